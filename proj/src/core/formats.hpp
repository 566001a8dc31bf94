#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/cost.hpp"
#include "core/enumerate.hpp"
#include "core/match.hpp"
#include "core/netlist.hpp"
#include "core/quantize.hpp"
#include "core/train.hpp"

// Line-oriented UTF-8 text with a versioned first line; binary only for
// weight/index payloads. Serialization is canonical: parsing a file and
// re-serializing it reproduces it byte for byte.
namespace addnet::io {

// Content hash of a canonical coefficient list (FNV-1a 64 over the decimal
// rendering); stable across runs and machines.
std::string set_id(std::span<const int32_t> coefficients);

// Writes via a temp file in the target directory plus rename.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

// ---- catalogs -------------------------------------------------------------

void save_catalog(const enumeration::Catalog& catalog, const std::filesystem::path& path);
enumeration::Catalog load_catalog(const std::filesystem::path& path);

// Streaming writer for catalogs too large to materialize.
class CatalogWriter {
public:
    CatalogWriter(const std::filesystem::path& path, rccm::Arch arch, int phi_max,
                  const std::string& generator, const std::string& order);
    void add(const rccm::CoefficientSet& set);
    // Writes the footer and renames into place. Must be called; the
    // destructor discards an unfinished file.
    void finish();
    ~CatalogWriter();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string format_config(const rccm::RccmConfig& config);   // witness field text
rccm::RccmConfig parse_config(rccm::Arch arch, const std::string& text);

// ---- weights --------------------------------------------------------------

struct WeightsRecord {
    std::string name;  // no whitespace
    std::vector<uint32_t> shape;
    std::vector<float> values;  // row-major
};

void save_weights(std::span<const WeightsRecord> records, const std::filesystem::path& path);
std::vector<WeightsRecord> load_weights(const std::filesystem::path& path);

// ---- encoded models ---------------------------------------------------------

void save_encoded(std::span<const quant::EncodedLayer> layers,
                  const std::filesystem::path& path);
std::vector<quant::EncodedLayer> load_encoded(const std::filesystem::path& path);

// ---- netlists ---------------------------------------------------------------

void save_netlist(const netlist::Netlist& nl, const std::filesystem::path& path);
netlist::Netlist load_netlist(const std::filesystem::path& path);

// ---- reports ----------------------------------------------------------------

// Ranked divergence report; `ranked_limit` caps the rank listing (the top
// window and chosen set always appear).
void save_match_report(const enumeration::Catalog& catalog, const matching::MatchResult& result,
                       const std::filesystem::path& path, size_t ranked_limit = 100);
void save_match_csv(const enumeration::Catalog& catalog, const matching::MatchResult& result,
                    const std::filesystem::path& path);

void save_cost_report(const cost::CostReport& report, const std::filesystem::path& path);
// Plot-ready sweep of LUT cost vs input width for every multiplier kind.
void save_cost_csv(const cost::CostParams& params, const std::filesystem::path& path);

void save_metrics(std::span<const train::EpochMetrics> history,
                  const std::filesystem::path& path);

} // namespace addnet::io

#include "core/enumerate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>
#include <unistd.h>
#include <unordered_map>

#include "core/error.hpp"

namespace addnet::enumeration {
namespace {

using rccm::Arch;
using rccm::CellConfigA;
using rccm::CellConfigB;
using rccm::MuxMapping;
using rccm::RccmConfig;

uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t hash_values(std::span<const int16_t> v, uint64_t seed) {
    uint64_t h = mix64(seed ^ (0x51ed2701 + v.size()));
    size_t i = 0;
    for (; i + 4 <= v.size(); i += 4) {
        uint64_t w;
        std::memcpy(&w, v.data() + i, 8);
        h = mix64(h ^ w);
    }
    uint64_t tail = 0;
    for (; i < v.size(); ++i) tail = (tail << 16) | static_cast<uint16_t>(v[i]);
    return mix64(h ^ tail);
}

int check_phi_max(Arch arch, int phi_max) {
    if (phi_max < 0)
        fail(ErrorCode::invalid_argument, "phi_max must be non-negative");
    // Magnitude bound of the final coefficients; must stay within int16.
    const int stages = arch == Arch::FourAdd ? 3 : 2;
    int64_t bound = 2;  // max type-A output at x=1 is 2^(phi+1)
    for (int i = 0; i < stages; ++i) bound <<= phi_max;
    bound = (bound << 1) + (1ll << phi_max);
    if (bound > 32000)
        fail(ErrorCode::invalid_argument, "phi_max too large for this architecture");
    return static_cast<int>(bound);
}

// ---- enumeration spaces --------------------------------------------------

// Type-B tap shifts are interchangeable over the select sweep, so (p1,p2)
// is enumerated unordered.
struct BClass {
    uint8_t p1, p2, p3;
};

std::vector<BClass> b_classes(int phi_max) {
    std::vector<BClass> out;
    for (int p1 = 0; p1 <= phi_max; ++p1)
        for (int p2 = p1; p2 <= phi_max; ++p2)
            for (int p3 = 0; p3 <= phi_max; ++p3)
                out.push_back({static_cast<uint8_t>(p1), static_cast<uint8_t>(p2),
                               static_cast<uint8_t>(p3)});
    return out;
}

// Value-level equivalence classes of type-A configs used for the FourAdd
// middle cell: the three added taps act as a set, and the fourth output is
// characterized by the negated tap's shift value (or none for PassB).
struct A3Class {
    std::vector<uint8_t> taps;  // sorted unique
    int neg;                    // -1 = PassB, else negated tap shift
    uint8_t p4;
    CellConfigA witness;
};

std::vector<A3Class> a3_classes(int phi_max) {
    std::map<std::tuple<std::vector<uint8_t>, int, uint8_t>, CellConfigA> seen;
    for (int m = 0; m < 4; ++m) {
        for (int s1 = 0; s1 <= phi_max; ++s1)
            for (int s2 = 0; s2 <= phi_max; ++s2)
                for (int s3 = 0; s3 <= phi_max; ++s3)
                    for (int s4 = 0; s4 <= phi_max; ++s4) {
                        CellConfigA cfg{static_cast<MuxMapping>(m),
                                        {static_cast<uint8_t>(s1), static_cast<uint8_t>(s2),
                                         static_cast<uint8_t>(s3), static_cast<uint8_t>(s4)}};
                        std::vector<uint8_t> taps = {cfg.shifts[0], cfg.shifts[1], cfg.shifts[2]};
                        std::sort(taps.begin(), taps.end());
                        taps.erase(std::unique(taps.begin(), taps.end()), taps.end());
                        const int neg =
                            m == 0 ? -1 : static_cast<int>(cfg.shifts[static_cast<size_t>(m - 1)]);
                        seen.emplace(std::tuple{taps, neg, cfg.shifts[3]}, cfg);
                    }
    }
    std::vector<A3Class> out;
    out.reserve(seen.size());
    for (const auto& [key, cfg] : seen)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), cfg});
    return out;
}

// Stamp-based small-set collector; avoids clearing between candidates.
class ValueScratch {
public:
    // Collects values in [-bound, bound].
    explicit ValueScratch(int bound) : bound_(bound), stamp_(2 * bound + 1, 0) {}

    void begin() {
        ++epoch_;
        vals_.clear();
    }

    void add(int32_t v) {
        uint32_t& s = stamp_[static_cast<size_t>(v + bound_)];
        if (s != epoch_) {
            s = epoch_;
            vals_.push_back(static_cast<int16_t>(v));
        }
    }

    std::span<const int16_t> finish() {
        std::sort(vals_.begin(), vals_.end());
        return vals_;
    }

private:
    int bound_;
    uint32_t epoch_ = 0;
    std::vector<uint32_t> stamp_;
    std::vector<int16_t> vals_;
};

// Witness keys pack config coordinates into a u64 so the minimum over
// duplicates is deterministic regardless of thread scheduling.
// Layout (high to low): outcome1:16 | outcome2:16 | a3class:16 | bclass:16.
uint64_t pack_witness(uint32_t o1, uint32_t o2, uint32_t a3, uint32_t bc) {
    return (static_cast<uint64_t>(o1) << 48) | (static_cast<uint64_t>(o2) << 32) |
           (static_cast<uint64_t>(a3) << 16) | bc;
}

struct WitnessTables {
    const std::vector<CellOutcome>* outcomes;
    const std::vector<A3Class>* a3;
    const std::vector<BClass>* bc;
    Arch arch;
};

RccmConfig build_witness(const WitnessTables& t, uint64_t key) {
    const uint32_t o1 = static_cast<uint32_t>(key >> 48) & 0xffff;
    const uint32_t o2 = static_cast<uint32_t>(key >> 32) & 0xffff;
    const uint32_t a3 = static_cast<uint32_t>(key >> 16) & 0xffff;
    const uint32_t bc = static_cast<uint32_t>(key) & 0xffff;
    RccmConfig cfg;
    cfg.arch = t.arch;
    switch (t.arch) {
        case Arch::TwoAdd:
            cfg.cells_a = {(*t.outcomes)[o1].witness};
            break;
        case Arch::ThreeAdd:
            cfg.cells_a = {(*t.outcomes)[o1].witness, (*t.outcomes)[o2].witness};
            break;
        case Arch::FourAdd:
            cfg.cells_a = {(*t.outcomes)[o1].witness, (*t.outcomes)[o2].witness,
                           (*t.a3)[a3].witness};
            break;
    }
    const BClass& b = (*t.bc)[bc];
    cfg.cell_b = CellConfigB{{b.p1, b.p2, b.p3}};
    return cfg;
}

std::vector<int32_t> expand_signed(std::span<const int16_t> mags) {
    const bool has_zero = !mags.empty() && mags.front() == 0;
    std::vector<int32_t> out;
    out.reserve(2 * mags.size());
    for (size_t i = mags.size(); i-- > (has_zero ? 1u : 0u);) out.push_back(-mags[i]);
    for (int16_t m : mags) out.push_back(m);
    return out;
}

// ---- sharded dedup with optional disk spill ------------------------------

class SetDedup {
public:
    SetDedup(uint64_t cap_bytes, std::filesystem::path spill_dir)
        : cap_(cap_bytes), spill_dir_(std::move(spill_dir)) {}

    ~SetDedup() { cleanup(); }

    void insert(std::span<const int16_t> mags, uint64_t witness) {
        const uint64_t h = hash_values(mags, 0xaddbe7);
        Shard& sh = shards_[h & kShardMask];
        std::lock_guard lock(sh.mu);
        if (sh.spilled) {
            append_record(sh, h, mags, witness);
            return;
        }
        if (insert_mem(sh, h, mags, witness) &&
            bytes_.fetch_add(2 * mags.size() + 40) + 2 * mags.size() + 40 > cap_)
            engage_spill();
    }

    // Calls sink per unique set: shard-major, (size, lex) within a shard.
    // Returns the unique count.
    uint64_t finalize(const WitnessTables& tables,
                      const std::function<void(const rccm::CoefficientSet&)>& sink) {
        uint64_t total = 0;
        for (Shard& sh : shards_) {
            std::vector<std::pair<std::vector<int32_t>, uint64_t>> items;
            if (sh.spilled) {
                sh.out.flush();
                sh.out.close();
                load_spill(sh);
            }
            items.reserve(sh.entries.size());
            for (const Entry& e : sh.entries)
                items.emplace_back(
                    expand_signed(std::span(sh.blob.data() + e.off, e.len)), e.witness);
            release(sh);
            std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
                if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
                return a.first < b.first;
            });
            total += items.size();
            if (sink)
                for (auto& [coeffs, wit] : items) {
                    rccm::CoefficientSet set;
                    set.coefficients = std::move(coeffs);
                    set.arch = tables.arch;
                    set.witness = build_witness(tables, wit);
                    sink(set);
                }
        }
        cleanup();
        return total;
    }

private:
    static constexpr size_t kShards = 64;
    static constexpr size_t kShardMask = kShards - 1;

    struct Entry {
        uint32_t off;
        uint16_t len;
        uint32_t next;  // collision chain, ~0u = end
        uint64_t witness;
    };

    struct Shard {
        std::mutex mu;
        std::vector<int16_t> blob;
        std::vector<Entry> entries;
        std::unordered_map<uint64_t, uint32_t> heads;
        bool spilled = false;
        std::ofstream out;
        std::filesystem::path path;
    };

    // Returns true when the key is new.
    bool insert_mem(Shard& sh, uint64_t h, std::span<const int16_t> mags, uint64_t witness) {
        auto [it, fresh] = sh.heads.try_emplace(h, static_cast<uint32_t>(sh.entries.size()));
        if (!fresh) {
            for (uint32_t i = it->second;; i = sh.entries[i].next) {
                Entry& e = sh.entries[i];
                if (e.len == mags.size() &&
                    std::memcmp(sh.blob.data() + e.off, mags.data(), 2 * mags.size()) == 0) {
                    e.witness = std::min(e.witness, witness);
                    return false;
                }
                if (e.next == ~0u) {
                    e.next = static_cast<uint32_t>(sh.entries.size());
                    break;
                }
            }
        }
        Entry e{static_cast<uint32_t>(sh.blob.size()), static_cast<uint16_t>(mags.size()), ~0u,
                witness};
        sh.blob.insert(sh.blob.end(), mags.begin(), mags.end());
        sh.entries.push_back(e);
        return true;
    }

    void engage_spill() {
        // Locks every shard exactly once; caller already holds one shard
        // lock, so this runs from a dedicated pass instead.
        if (spill_pending_.exchange(true)) return;
    }

    void maybe_spill() {
        if (!spill_pending_.load() || spill_done_) return;
        std::scoped_lock all(global_mu_);
        if (spill_done_) return;
        if (spill_dir_.empty()) spill_dir_ = std::filesystem::temp_directory_path();
        dir_ = spill_dir_ / ("addnet-spill-" + std::to_string(::getpid()) + "-" +
                             std::to_string(reinterpret_cast<uintptr_t>(this)));
        std::filesystem::create_directories(dir_);
        for (size_t i = 0; i < kShards; ++i) {
            Shard& sh = shards_[i];
            std::lock_guard lock(sh.mu);
            sh.path = dir_ / ("shard-" + std::to_string(i) + ".bin");
            sh.out.open(sh.path, std::ios::binary);
            if (!sh.out) fail(ErrorCode::io, "cannot open spill file " + sh.path.string());
            for (const Entry& e : sh.entries) {
                const uint64_t h =
                    hash_values(std::span(sh.blob.data() + e.off, e.len), 0xaddbe7);
                append_record(sh, h, std::span(sh.blob.data() + e.off, e.len), e.witness);
            }
            release(sh);
            sh.spilled = true;
        }
        spill_done_ = true;
    }

    void append_record(Shard& sh, uint64_t h, std::span<const int16_t> mags, uint64_t witness) {
        const uint16_t len = static_cast<uint16_t>(mags.size());
        sh.out.write(reinterpret_cast<const char*>(&h), 8);
        sh.out.write(reinterpret_cast<const char*>(&len), 2);
        sh.out.write(reinterpret_cast<const char*>(&witness), 8);
        sh.out.write(reinterpret_cast<const char*>(mags.data()), 2 * len);
    }

    void load_spill(Shard& sh) {
        std::ifstream in(sh.path, std::ios::binary);
        if (!in) fail(ErrorCode::io, "cannot reopen spill file " + sh.path.string());
        uint64_t h, witness;
        uint16_t len;
        std::vector<int16_t> mags;
        while (in.read(reinterpret_cast<char*>(&h), 8)) {
            in.read(reinterpret_cast<char*>(&len), 2);
            in.read(reinterpret_cast<char*>(&witness), 8);
            mags.resize(len);
            in.read(reinterpret_cast<char*>(mags.data()), 2 * len);
            insert_mem(sh, h, mags, witness);
        }
    }

    void release(Shard& sh) {
        sh.heads = {};
        sh.blob = {};
        sh.entries = {};
    }

    void cleanup() {
        if (!dir_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(dir_, ec);
            dir_.clear();
        }
    }

    friend class SpillGate;

public:
    // Called by workers at safe points (no shard lock held).
    void poll_spill() { maybe_spill(); }

private:
    uint64_t cap_;
    std::filesystem::path spill_dir_;
    std::filesystem::path dir_;
    std::array<Shard, kShards> shards_;
    std::atomic<uint64_t> bytes_{0};
    std::atomic<bool> spill_pending_{false};
    bool spill_done_ = false;
    std::mutex global_mu_;
};

// ---- 128-bit fingerprint set (count-only path) ---------------------------

class Fp128Set {
public:
    Fp128Set() : slots_(1u << 16), mask_((1u << 16) - 1) {}

    void insert(std::span<const int16_t> mags) {
        unsigned __int128 fp = hash_values(mags, 0x5eedA);
        fp = (fp << 64) | hash_values(mags, 0x5eedB);
        if (fp == 0) fp = 1;
        if (insert_raw(fp) && ++count_ * 10 > slots_.size() * 7) grow();
    }

    uint64_t size() const { return count_; }

private:
    bool insert_raw(unsigned __int128 fp) {
        size_t i = static_cast<uint64_t>(fp) & mask_;
        while (slots_[i] != 0) {
            if (slots_[i] == fp) return false;
            i = (i + 1) & mask_;
        }
        slots_[i] = fp;
        return true;
    }

    void grow() {
        std::vector<unsigned __int128> old;
        old.swap(slots_);
        slots_.assign(old.size() * 2, 0);
        mask_ = slots_.size() - 1;
        for (auto fp : old)
            if (fp != 0) insert_raw(fp);
    }

    std::vector<unsigned __int128> slots_;
    size_t mask_;
    uint64_t count_ = 0;
};

// ---- staged candidate generation -----------------------------------------

struct Progress {
    const EnumerateOptions* opt;
    std::atomic<uint64_t> done{0};
    uint64_t total = 0;
    std::mutex mu;

    void tick(uint64_t n = 1) {
        const uint64_t d = done.fetch_add(n) + n;
        if (opt->progress && (d & 0x3ff) == 0) {
            std::lock_guard lock(mu);
            opt->progress(d, total);
        }
    }

    void finish_phase() {
        if (opt->progress) {
            std::lock_guard lock(mu);
            opt->progress(done.load(), total);
        }
    }
};

void run_threads(unsigned threads, uint64_t n,
                 const std::function<void(unsigned, uint64_t, uint64_t)>& body) {
    if (threads <= 1 || n <= 1) {
        body(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    const uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const uint64_t b = std::min<uint64_t>(t * chunk, n);
        const uint64_t e = std::min<uint64_t>(b + chunk, n);
        if (b < e) pool.emplace_back(body, t, b, e);
    }
    for (auto& th : pool) th.join();
}

// Interned t3 value sets for the FourAdd middle stage.
struct T3Sets {
    std::vector<int16_t> blob;
    struct Ent {
        uint32_t off;
        uint16_t len;
        uint32_t next;
        uint64_t witness;  // min pack_witness(o1, o2, a3, 0)
    };
    std::vector<Ent> entries;
    std::unordered_map<uint64_t, uint32_t> heads;
    std::mutex mu;

    void insert(std::span<const int16_t> vals, uint64_t witness) {
        const uint64_t h = hash_values(vals, 0x733);
        std::lock_guard lock(mu);
        auto [it, fresh] = heads.try_emplace(h, static_cast<uint32_t>(entries.size()));
        if (!fresh) {
            for (uint32_t i = it->second;; i = entries[i].next) {
                Ent& e = entries[i];
                if (e.len == vals.size() &&
                    std::memcmp(blob.data() + e.off, vals.data(), 2 * vals.size()) == 0) {
                    e.witness = std::min(e.witness, witness);
                    return;
                }
                if (e.next == ~0u) {
                    e.next = static_cast<uint32_t>(entries.size());
                    break;
                }
            }
        }
        entries.push_back(
            {static_cast<uint32_t>(blob.size()), static_cast<uint16_t>(vals.size()), ~0u, witness});
        blob.insert(blob.end(), vals.begin(), vals.end());
    }
};

struct Space {
    std::vector<CellOutcome> outcomes;
    std::vector<BClass> bcls;
    std::vector<A3Class> a3cls;
    int final_bound = 0;
    int t3_bound = 0;
};

Space build_space(Arch arch, int phi_max) {
    Space sp;
    sp.final_bound = check_phi_max(arch, phi_max);
    sp.outcomes = enumerate_cell_a(phi_max);
    if (sp.outcomes.size() > 0xffff)
        fail(ErrorCode::internal, "outcome index exceeds witness key width");
    sp.bcls = b_classes(phi_max);
    if (arch == Arch::FourAdd) {
        sp.a3cls = a3_classes(phi_max);
        sp.t3_bound = 4 << (2 * phi_max);  // 2^(phi+1) shifted by phi, twice
    }
    return sp;
}

// Emits every staged candidate as (sorted magnitudes, witness key).
template <typename Emit>
uint64_t generate(Arch arch, const Space& sp, const EnumerateOptions& opt, Progress& prog,
                  SetDedup* dedup_for_poll, const Emit& emit) {
    const unsigned threads =
        opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<uint64_t> candidates{0};
    const auto& outs = sp.outcomes;
    const auto& bcls = sp.bcls;

    if (arch == Arch::TwoAdd) {
        prog.total = outs.size();
        run_threads(threads, outs.size(), [&](unsigned, uint64_t lo, uint64_t hi) {
            ValueScratch scratch(sp.final_bound);
            uint64_t local = 0;
            for (uint64_t oi = lo; oi < hi; ++oi) {
                const auto& T = outs[oi].values;
                for (uint32_t bi = 0; bi < bcls.size(); ++bi) {
                    const auto& b = bcls[bi];
                    const int32_t b1 = 1 << b.p3;
                    scratch.begin();
                    for (int32_t t : T) {
                        scratch.add(std::abs((t << b.p1) - b1));
                        scratch.add(std::abs((t << b.p2) - b1));
                    }
                    emit(scratch.finish(), pack_witness(static_cast<uint32_t>(oi), 0, 0, bi));
                    ++local;
                }
                prog.tick();
                if (dedup_for_poll) dedup_for_poll->poll_spill();
            }
            candidates += local;
        });
        prog.finish_phase();
        return candidates.load();
    }

    if (arch == Arch::ThreeAdd) {
        const uint64_t pairs = static_cast<uint64_t>(outs.size()) * outs.size();
        prog.total = pairs;
        run_threads(threads, pairs, [&](unsigned, uint64_t lo, uint64_t hi) {
            ValueScratch scratch(sp.final_bound);
            uint64_t local = 0;
            for (uint64_t p = lo; p < hi; ++p) {
                const uint32_t o1 = static_cast<uint32_t>(p / outs.size());
                const uint32_t o2 = static_cast<uint32_t>(p % outs.size());
                const auto& T1 = outs[o1].values;
                const auto& T2 = outs[o2].values;
                for (uint32_t bi = 0; bi < bcls.size(); ++bi) {
                    const auto& b = bcls[bi];
                    scratch.begin();
                    for (int32_t t1 : T1) {
                        const int32_t a1 = t1 << b.p1;
                        const int32_t a2 = t1 << b.p2;
                        for (int32_t t2 : T2) {
                            const int32_t b1 = t2 << b.p3;
                            scratch.add(std::abs(a1 - b1));
                            scratch.add(std::abs(a2 - b1));
                        }
                    }
                    emit(scratch.finish(), pack_witness(o1, o2, 0, bi));
                    ++local;
                }
                prog.tick();
                if (dedup_for_poll) dedup_for_poll->poll_spill();
            }
            candidates += local;
        });
        prog.finish_phase();
        return candidates.load();
    }

    // FourAdd: stage 1 dedupes reachable middle-cell value sets, stage 2
    // crosses them with the output cell.
    T3Sets t3;
    const uint64_t pairs = static_cast<uint64_t>(outs.size()) * outs.size();
    prog.total = pairs;  // stage-2 total added once known
    run_threads(threads, pairs, [&](unsigned, uint64_t lo, uint64_t hi) {
        ValueScratch scratch(sp.t3_bound);
        for (uint64_t p = lo; p < hi; ++p) {
            const uint32_t o1 = static_cast<uint32_t>(p / outs.size());
            const uint32_t o2 = static_cast<uint32_t>(p % outs.size());
            const auto& T1 = outs[o1].values;
            const auto& T2 = outs[o2].values;
            for (uint32_t ci = 0; ci < sp.a3cls.size(); ++ci) {
                const A3Class& c = sp.a3cls[ci];
                scratch.begin();
                for (int32_t t2 : T2) {
                    const int32_t b1 = t2 << c.p4;
                    for (int32_t t1 : T1) {
                        for (uint8_t tap : c.taps) scratch.add((t1 << tap) + b1);
                        if (c.neg >= 0)
                            scratch.add(b1 - (t1 << c.neg));
                        else
                            scratch.add(b1);
                    }
                }
                t3.insert(scratch.finish(), pack_witness(o1, o2, ci, 0));
            }
            prog.tick();
        }
    });
    prog.finish_phase();

    const uint64_t m = t3.entries.size();
    prog.total += m;
    run_threads(threads, m, [&](unsigned, uint64_t lo, uint64_t hi) {
        ValueScratch scratch(sp.final_bound);
        uint64_t local = 0;
        for (uint64_t i = lo; i < hi; ++i) {
            const auto& e = t3.entries[i];
            const std::span<const int16_t> T3(t3.blob.data() + e.off, e.len);
            for (uint32_t bi = 0; bi < bcls.size(); ++bi) {
                const auto& b = bcls[bi];
                const int32_t b1 = 1 << b.p3;
                scratch.begin();
                for (int16_t t : T3) {
                    scratch.add(std::abs((static_cast<int32_t>(t) << b.p1) - b1));
                    scratch.add(std::abs((static_cast<int32_t>(t) << b.p2) - b1));
                }
                emit(scratch.finish(), e.witness | bi);
                ++local;
            }
            prog.tick();
            if (dedup_for_poll) dedup_for_poll->poll_spill();
        }
        candidates += local;
    });
    prog.finish_phase();
    return candidates.load();
}

} // namespace

std::vector<CellOutcome> enumerate_cell_a(int phi_max) {
    if (phi_max < 0)
        fail(ErrorCode::invalid_argument, "phi_max must be non-negative");
    if (phi_max > 6)
        fail(ErrorCode::invalid_argument, "phi_max too large");
    std::vector<CellOutcome> out;
    std::unordered_map<uint64_t, std::vector<uint32_t>> seen;
    for (int m = 0; m < 4; ++m) {
        for (int s1 = 0; s1 <= phi_max; ++s1)
            for (int s2 = 0; s2 <= phi_max; ++s2)
                for (int s3 = 0; s3 <= phi_max; ++s3)
                    for (int s4 = 0; s4 <= phi_max; ++s4) {
                        CellConfigA cfg{static_cast<MuxMapping>(m),
                                        {static_cast<uint8_t>(s1), static_cast<uint8_t>(s2),
                                         static_cast<uint8_t>(s3), static_cast<uint8_t>(s4)}};
                        std::vector<int32_t> vals;
                        for (unsigned s = 0; s < 4; ++s)
                            vals.push_back(static_cast<int32_t>(rccm::eval_cell_a(cfg, 1, 1, s)));
                        std::sort(vals.begin(), vals.end());
                        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
                        uint64_t h = mix64(vals.size());
                        for (int32_t v : vals) h = mix64(h ^ static_cast<uint32_t>(v));
                        auto& bucket = seen[h];
                        bool dup = false;
                        for (uint32_t idx : bucket)
                            if (out[idx].values == vals) {
                                dup = true;
                                break;
                            }
                        if (!dup) {
                            bucket.push_back(static_cast<uint32_t>(out.size()));
                            out.push_back({std::move(vals), cfg});
                        }
                    }
    }
    return out;
}

uint64_t enumerate_stream(Arch arch, const EnumerateOptions& opt,
                          const std::function<void(const rccm::CoefficientSet&)>& sink) {
    const Space sp = build_space(arch, opt.phi_max);
    SetDedup dedup(opt.memory_cap_bytes, opt.spill_dir);
    Progress prog{&opt};
    generate(arch, sp, opt, prog, &dedup,
             [&](std::span<const int16_t> mags, uint64_t wit) { dedup.insert(mags, wit); });
    const WitnessTables tables{&sp.outcomes, &sp.a3cls, &sp.bcls, arch};
    return dedup.finalize(tables, sink);
}

Catalog enumerate_sets(Arch arch, const EnumerateOptions& opt) {
    Catalog cat;
    cat.arch = arch;
    cat.phi_max = opt.phi_max;
    cat.generator = kGeneratorTag;
    enumerate_stream(arch, opt,
                     [&](const rccm::CoefficientSet& set) { cat.entries.push_back(set); });
    std::sort(cat.entries.begin(), cat.entries.end(), [](const auto& a, const auto& b) {
        if (a.coefficients.size() != b.coefficients.size())
            return a.coefficients.size() < b.coefficients.size();
        return a.coefficients < b.coefficients;
    });
    return cat;
}

CountResult count_unique_sets(Arch arch, const EnumerateOptions& opt) {
    const Space sp = build_space(arch, opt.phi_max);
    // Sharded only to bound lock contention; the fingerprint sets are tiny
    // next to materialized catalogs.
    constexpr size_t kShards = 64;
    std::array<Fp128Set, kShards> sets;
    std::array<std::mutex, kShards> mus;
    Progress prog{&opt};
    CountResult res;
    res.candidates =
        generate(arch, sp, opt, prog, nullptr, [&](std::span<const int16_t> mags, uint64_t) {
            const size_t s = hash_values(mags, 0x0ddba11) & (kShards - 1);
            std::lock_guard lock(mus[s]);
            sets[s].insert(mags);
        });
    for (const auto& s : sets) res.unique_sets += s.size();
    return res;
}

bool contains(const Catalog& catalog, std::span<const int32_t> canonical) {
    for (size_t i = 1; i < canonical.size(); ++i)
        if (canonical[i - 1] >= canonical[i])
            fail(ErrorCode::invalid_argument, "set must be sorted strictly ascending");
    const auto cmp = [](const rccm::CoefficientSet& e, std::span<const int32_t> v) {
        if (e.coefficients.size() != v.size()) return e.coefficients.size() < v.size();
        return std::lexicographical_compare(e.coefficients.begin(), e.coefficients.end(),
                                            v.begin(), v.end());
    };
    auto it = std::lower_bound(catalog.entries.begin(), catalog.entries.end(), canonical, cmp);
    return it != catalog.entries.end() && it->coefficients.size() == canonical.size() &&
           std::equal(it->coefficients.begin(), it->coefficients.end(), canonical.begin());
}

} // namespace addnet::enumeration

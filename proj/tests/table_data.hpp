#pragma once

// Reference coefficient data shared by the unit and acceptance suites: the
// published magnitude lists for the three shipped configurations and the
// unoptimized 63-coefficient comparison set.

#include <algorithm>
#include <cstdint>
#include <vector>

namespace testdata {

inline const std::vector<int32_t> kTwoAddMagnitudes = {0, 1, 2, 8, 28, 36, 44, 92};

inline const std::vector<int32_t> kThreeAddMagnitudes = {
    0, 1, 2, 3, 4, 5, 6, 7, 9, 10, 12, 13, 14, 16, 23, 29, 30, 32, 63, 69, 70, 72, 87, 93, 94,
    96, 119, 125, 126, 128};

inline const std::vector<int32_t> kFourAddMagnitudes = {
    0,   1,   2,   4,   5,   7,   8,   9,   11,  13,  14,  15,  16,  18,  19,  20,  21,  22,
    23,  24,  25,  26,  27,  28,  29,  30,  31,  32,  33,  34,  36,  37,  38,  39,  40,  46,
    48,  54,  58,  64,  69,  70,  71,  74,  75,  76,  78,  80,  81,  82,  84,  85,  87,  94,
    96,  102, 114, 118, 126, 134, 142, 150, 166, 174, 182, 190, 194, 198, 206, 214, 222, 230,
    238, 246, 258, 262, 270, 278, 286, 302, 310, 318, 326, 334, 382, 398, 446, 450, 526, 566,
    574, 582, 614, 622, 654, 662, 670, 686, 694, 710, 766, 782, 830, 1214};

inline const std::vector<int32_t> kUnoptimized63Magnitudes = {
    0,  8,  12, 14, 16, 18, 20, 21, 23, 24, 36, 38, 40, 42, 44, 45,
    47, 49, 51, 52, 54, 56, 58, 60, 68, 70, 72, 74, 76, 77, 79, 88};

inline std::vector<int32_t> expand_signed(const std::vector<int32_t>& magnitudes) {
    std::vector<int32_t> out;
    for (auto it = magnitudes.rbegin(); it != magnitudes.rend(); ++it)
        if (*it != 0) out.push_back(-*it);
    for (int32_t m : magnitudes) out.push_back(m);
    return out;
}

} // namespace testdata

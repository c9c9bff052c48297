#pragma once

#include <array>

#include "mitopt/model.hpp"

namespace mitopt::presets {

// Built-in illustration: six parameter rows on the stimulus window [0, 15].
inline constexpr double kLower = 0.0;
inline constexpr double kUpper = 15.0;

inline constexpr std::array<std::array<double, 3>, 6> kParamRows{{
    {0.5, 1.2, 0.9},
    {0.5, 1.0, 1.0},
    {0.5, 0.8, 1.1},
    {1.0, 1.2, 0.9},
    {1.0, 1.0, 1.0},
    {1.0, 0.8, 1.1},
}};

inline constexpr std::array<int, 3> kBinomialTrials{25, 50, 100};

inline constexpr std::array<double, 3> kDilutions{60.0, 30.0, 15.0};

inline ModelParams row(int i) {
    return ModelParams{kParamRows.at(static_cast<size_t>(i))[0],
                       kParamRows.at(static_cast<size_t>(i))[1],
                       kParamRows.at(static_cast<size_t>(i))[2]};
}

inline Bounds window() { return Bounds{kLower, kUpper}; }

}  // namespace mitopt::presets

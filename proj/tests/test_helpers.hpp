#pragma once

#include <cmath>
#include <memory>

#include "solwave/background_flow.hpp"

namespace testutil {

inline solwave::BackgroundCurrent irrotational_current() {
    solwave::BackgroundCurrent c;
    c.shear = {{-1.0, 1.0}, {0.0, 1.0}};
    return c;
}

inline solwave::BackgroundCurrent two_layer_current() {
    solwave::BackgroundCurrent c;
    c.shear = {{-1.0, 1.0}, {-0.5, 1.0}, {0.0, 1.5}};
    return c;
}

inline solwave::BackgroundCurrent three_layer_current() {
    solwave::BackgroundCurrent c;
    c.shear = {{-1.0, 1.2}, {-0.6, 1.0}, {-0.3, 1.0}, {0.0, 1.4}};
    return c;
}

inline std::shared_ptr<const solwave::LaminarProfile> irrotational(int n_s = 64) {
    return std::make_shared<const solwave::LaminarProfile>(
        solwave::build_profile(irrotational_current(), n_s));
}

inline std::shared_ptr<const solwave::LaminarProfile> two_layer(int n_s = 64) {
    return std::make_shared<const solwave::LaminarProfile>(
        solwave::build_profile(two_layer_current(), n_s));
}

inline std::shared_ptr<const solwave::LaminarProfile> three_layer(int n_s = 64) {
    return std::make_shared<const solwave::LaminarProfile>(
        solwave::build_profile(three_layer_current(), n_s));
}

}  // namespace testutil

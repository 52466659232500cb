#pragma once

#include <stdexcept>
#include <string>

namespace hmr {

/// A value or query falls outside its documented domain (token coordinate,
/// trajectory time, simulation horizon, ...).
struct OutOfRange : std::out_of_range {
    explicit OutOfRange(const std::string& what) : std::out_of_range(what) {}
};

} // namespace hmr

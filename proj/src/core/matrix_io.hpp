#pragma once

#include <string>

#include "core/stable_scheme.hpp"
#include "core/vandermonde_scheme.hpp"

namespace gradcode {

// Binary scheme container, explicitly little-endian:
//   "GCM1"  u32 n,k,d,s,m,l            then V, B row-major f64
//   "GCS1"  u32 n,k,d,s,m,l  u64 seed  f64 kappa  then V, B row-major f64
// l is the caller-facing gradient dimension (padding is re-derived on load).

void save_scheme(const VandermondeScheme &scheme, const std::string &path);
void save_scheme(const StableScheme &scheme, const std::string &path);

/// Reads the magic and dispatches; throws IoError on unknown magic or
/// truncated content.
enum class SchemeFileKind { kVandermonde, kStable };
SchemeFileKind peek_scheme_kind(const std::string &path);

VandermondeScheme load_vandermonde_scheme(const std::string &path);
StableScheme load_stable_scheme(const std::string &path);

}  // namespace gradcode

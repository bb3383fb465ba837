#pragma once

#include <string>
#include <string_view>

#include "invarlab/lab.hpp"
#include "invarlab/scenario.hpp"

namespace invarlab {

/// Parse the sectioned key-value scenario format:
///
///   [labels]            # either "size = k" (uniform prior) or "prior = p0,p1,..."
///   size = 2
///   [sites]
///   names = A,B
///   prior = 0.5,0.5     # omit and provide [coupling] joint for correlated y,s
///   [coupling]          # optional; row-major p(y,s) table, overrides priors
///   joint = 0.25,0.25, 0.25,0.25
///   [scanner.A]
///   kind = bsc
///   epsilon = 0.1
///   [scanner.B]
///   kind = explicit
///   x_size = 3
///   rows = 0.9,0.1,0.0, 0.1,0.9,0.0   # row-major p(x|y, s=B)
///
/// Unknown sections and keys are rejected with the offending name; parse
/// errors carry a line number, semantic errors name the entity.
Scenario parse_scenario(std::string_view text);

/// Inverse of parse_scenario; floats at 17 significant digits so that
/// parse_scenario(serialize_scenario(s)) == s bit-exactly.
std::string serialize_scenario(const Scenario& scenario);

/// Parse an encoder table bound to a known observation alphabet:
///
///   [encoder]
///   z_size = 2
///   rows = 1,0, 0,1    # row-major q(z|x), one row per observation symbol
Encoder parse_encoder(std::string_view text, const Alphabet& observations);

std::string serialize_encoder(const Encoder& encoder);

/// Format a double with 17 significant digits (round-trip exact).
std::string format_real(double value);

}  // namespace invarlab

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "lbpcert/factor_graph.hpp"

namespace lbpcert {

/// Raised on malformed factor-graph text; the message names the offending
/// token and its line.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses the factor-graph text format:
///
///   F                          number of factor blocks
///   per block:
///     k                        arity
///     v_1 ... v_k              variable ids
///     c_1 ... c_k              cardinalities
///     E                        table length, = c_1 * ... * c_k
///     idx val   (E pairs)      idx in [0,E), val > 0, first variable fastest
///
/// Tokens are whitespace separated; '#' starts a comment to end of line.
/// Entries may appear in any index order but each index exactly once.
/// Variable ids must be contiguous 0..N-1 with consistent cardinalities.
FactorGraph parse_factor_graph(std::istream& in);
FactorGraph parse_factor_graph(const std::string& text);

/// Canonical serialization: entries in index order, floats in the shortest
/// decimal form that round-trips. parse(serialize(g)) == g exactly.
void serialize_factor_graph(const FactorGraph& g, std::ostream& out);
std::string serialize_factor_graph(const FactorGraph& g);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace lbpcert

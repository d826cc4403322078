#pragma once

#include <string>

#include "krden/lattice.hpp"

namespace krden {

// Parse a lattice from either a shorthand or a JSON object literal.
//
// Shorthands (p supplied separately):
//   "diag:a,b,c"   diagonal lattice, rational entries like 2, -1/3, 9/4
//   "H+:n" "H-:n"  self-dual lattice of rank n with sign +/-
//   "H0(p)"        H_2^+[p] + H_2^+
//   "H0(p)^"       its dual
//   "S"            trace-zero quaternion sublattice
//   "OB"           maximal-order quaternion lattice
//   "OB^"          its dual
//   "scale:e:<inner>"  inner lattice with the form multiplied by p^e
//
// JSON form: {"p": 3, "gram": [["0","1/2"],["1/2","0"]]}; entries may be
// numbers or rational strings.  A "p" key in the JSON overrides the
// argument.
QuadLattice parse_lattice(const std::string& text, long p);

// Serialize to the JSON object form; parse_lattice round-trips it.
std::string lattice_to_json(const QuadLattice& L);

}  // namespace krden

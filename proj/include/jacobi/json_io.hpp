// JSON serialization of ring elements.
//
// A polynomial serializes as a list of terms in canonical monomial order:
//   [{"coeff": "p/q", "mono": [[kind, i, s, exp], ...]}, ...]
// where kind is "u" (even), "t" (theta) or "z" (zeta), and exp is a rational
// string. For odd factors exp is "1"; the factors appear in canonical order
// (z first, then t[i,s] by (i,s)), so serialization is deterministic and
// round-trips exactly.
#pragma once

#include "json.hpp"

#include "jacobi/superpoly.hpp"

namespace jacobi {

using Json = nlohmann::ordered_json;

Json poly_to_json(const SuperPoly& p);
SuperPoly poly_from_json(const Json& j);

}  // namespace jacobi

#pragma once

// Worked examples built programmatically.  The corpus files are emitted
// from these and checked back against them.

#include <string>
#include <utility>
#include <vector>

#include "dainf/structure.hpp"

namespace dainf {

using Output = std::vector<std::pair<std::string, Scalar>>;

// Sets f(in_1, ..., in_n) = sum of coefficient * name, by basis names.
void set_by_names(MultiCochain& f, const std::vector<std::string>& in, const Output& out);

// Z[e]/(e^top) with |e| = (0,-1) and d(e) = p.
StructureFamily truncated_polynomial_dga(long p, int top = 4);

// The bidga Z<a,b>/(a^2, b^top, ab - ba) with |a| = (1,0), |b| = (0,-v)
// and m_11(a) = p.  For the defaults its horizontal homology is
// Lambda_{Z/p}(b).
StructureFamily exterior_resolution_bidga(long p, int top = 2, int v = 2);

// The candidate E_2-equivalence from the bidga above to Z[e]/(e^4):
// 1 -> 1, b -> e^2.
MultiCochain resolution_map(const StructureFamily& C, const StructureFamily& A);

// k<x,y>/(x^3, y^2, xy = -yx), d(y) = x^2, |x| = 2, |y| = 3 over the ring R.
StructureFamily massey_dga(const Ring& R);

// Z_(p)[x] (x) Lambda(e) / (x^m, x^{m-1} e), d(x) = p e, |e| = -(2p-3),
// |x| = -(2p-2), over Z_(p).
StructureFamily truncated_exterior_dga(long p, int m);

// The ground ring as a bidga concentrated in bidegree (0,0).
StructureFamily ground_ring_bidga(const Ring& R);

// Lambda(b) with |b| = (0,-2) and zero differentials.
StructureFamily exterior_bidga(const Ring& R);

// B plus a horizontally acyclic pair c = m_11(a) with |a| = (1,-2),
// |c| = (0,-2), multiplying trivially with everything except the unit.
// The inclusion of B is an E_2-equivalence.  B must have m_11 = 0, since
// otherwise the Leibniz rule fails on products with a.
StructureFamily with_acyclic_pair(const StructureFamily& B, const std::string& a, const std::string& c);

// The inclusion of B into with_acyclic_pair(B, ...) on the shared basis.
MultiCochain inclusion_map(const StructureFamily& B, const StructureFamily& target);

}  // namespace dainf

#ifndef SFL_COVERING_HPP
#define SFL_COVERING_HPP

#include <optional>

#include "sfl/matrix.hpp"

namespace sfl {

// Checks the grid-covering inclusion: every g in [-n1, n1] on the dyadic
// grid 2^-m Z^d decomposes as g = y + sum a_i u_i + sum b_j v_j with
// y in [-M1, M1] on the same grid and all coefficients dyadic multiples of
// 2^-m bounded by M*n in absolute value. u and v together must form a
// rationally independent set of d = u.cols + v.cols vectors, so for each
// candidate y the coefficients are the unique solution of a full-rank linear
// system, solved exactly.
bool verify_covering(long m_bound, const IntMatrix& u, const IntMatrix& v,
                     long n, int level);

// Smallest M <= m_max with verify_covering true for all n in 1..n_probe and
// levels 0..m_probe; nullopt when no such M exists in range.
std::optional<long> covering_constant_search(const IntMatrix& u, const IntMatrix& v,
                                             long n_probe, int m_probe, long m_max);

}  // namespace sfl

#endif  // SFL_COVERING_HPP

#pragma once

// Initial data and forcing sources.
//
// Forcing tables are CSV with header "t,node,value". Node ids 0..N-1 address
// bulk nodes, N..N+B-1 address boundary chain positions. A table is
// piecewise constant in time: at time t the latest block with t_k <= t applies
// (nodes missing from a block are 0; before the first block the source is 0).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "chbs/spaces.hpp"

namespace chbs {

using Forcing = std::function<FieldPair(double t)>;

Forcing zero_forcing(std::shared_ptr<const DiscreteDomain> dom);
Forcing constant_forcing(std::shared_ptr<const DiscreteDomain> dom, double bulk_value, double surf_value);
/// f = A cos(pi x) cos(pi y) in the bulk, A_Gamma cos(pi x) cos(pi y) on the boundary; constant in time.
Forcing cosine_forcing(std::shared_ptr<const DiscreteDomain> dom, double amplitude, double surf_amplitude);
/// f1 + scale * f2
Forcing combine(Forcing f1, double scale, Forcing f2);

struct ForcingTable {
    std::vector<double> times;                              // strictly increasing block times
    std::vector<std::vector<std::pair<int, double>>> rows;  // per block: (node id, value)
};

ForcingTable parse_forcing_table(std::istream& in);
Forcing table_forcing(std::shared_ptr<const DiscreteDomain> dom, ForcingTable table);

/// Counter-based generator: uniform in [-1, 1) from splitmix64(seed + counter * golden gamma).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// u0 = mean + amplitude * P(xi), xi_i = counter_uniform(seed, i) on bulk nodes, boundary = trace.
/// The combined mean of the result equals `mean` up to rounding.
FieldPair random_initial(const DiscreteDomain& dom, const PairSpace& space, double mean, double amplitude,
                         std::uint64_t seed);

/// Bulk nodal values read from CSV "node,value" (every bulk node must appear once); boundary = trace.
FieldPair table_initial(const DiscreteDomain& dom, std::istream& in);

}  // namespace chbs

#include "chbs/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

#include "chbs/errors.hpp"
#include "chbs/io.hpp"

namespace chbs {

Forcing zero_forcing(std::shared_ptr<const DiscreteDomain> dom) {
    return [dom](double) { return FieldPair::zeros(*dom); };
}

Forcing constant_forcing(std::shared_ptr<const DiscreteDomain> dom, double bulk_value, double surf_value) {
    FieldPair f{Vector::Constant(dom->bulk_size(), bulk_value), Vector::Constant(dom->boundary_size(), surf_value)};
    return [f = std::move(f)](double) { return f; };
}

Forcing cosine_forcing(std::shared_ptr<const DiscreteDomain> dom, double amplitude, double surf_amplitude) {
    Vector shape(dom->bulk_size());
    for (int i = 0; i < dom->bulk_size(); ++i) {
        shape[i] = std::cos(std::numbers::pi * dom->x[i]) * std::cos(std::numbers::pi * dom->y[i]);
    }
    FieldPair f{amplitude * shape, surf_amplitude * dom->trace(shape)};
    return [f = std::move(f)](double) { return f; };
}

Forcing combine(Forcing f1, double scale, Forcing f2) {
    return [f1 = std::move(f1), f2 = std::move(f2), scale](double t) { return f1(t) + scale * f2(t); };
}

ForcingTable parse_forcing_table(std::istream& in) {
    const CsvTable csv = read_csv(in);
    if (csv.header != std::vector<std::string>{"t", "node", "value"}) {
        throw ConfigError("forcing table header must be 't,node,value'");
    }
    ForcingTable table;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const double t = parse_double(row[0], "forcing table t");
        const double node = parse_double(row[1], "forcing table node");
        const double value = parse_double(row[2], "forcing table value");
        if (node < 0 || node != std::floor(node)) throw ConfigError("forcing table: invalid node id on data row " + std::to_string(r + 1));
        if (table.times.empty() || t > table.times.back()) {
            table.times.push_back(t);
            table.rows.emplace_back();
        } else if (t < table.times.back()) {
            throw ConfigError("forcing table: times must be nondecreasing (data row " + std::to_string(r + 1) + ")");
        }
        table.rows.back().emplace_back(static_cast<int>(node), value);
    }
    return table;
}

Forcing table_forcing(std::shared_ptr<const DiscreteDomain> dom, ForcingTable table) {
    const int N = dom->bulk_size();
    const int B = dom->boundary_size();
    std::vector<FieldPair> blocks;
    blocks.reserve(table.rows.size());
    for (const auto& rows : table.rows) {
        FieldPair f = FieldPair::zeros(*dom);
        for (const auto& [node, value] : rows) {
            if (node < N) {
                f.bulk[node] = value;
            } else if (node < N + B) {
                f.boundary[node - N] = value;
            } else {
                throw ConfigError("forcing table: node id " + std::to_string(node) + " out of range");
            }
        }
        blocks.push_back(std::move(f));
    }
    return [dom, times = std::move(table.times), blocks = std::move(blocks)](double t) {
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return FieldPair::zeros(*dom);
        return blocks[static_cast<std::size_t>(it - times.begin()) - 1];
    };
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return 2.0 * static_cast<double>(z >> 11) * 0x1.0p-53 - 1.0;
}

FieldPair random_initial(const DiscreteDomain& dom, const PairSpace& space, double mean, double amplitude,
                         std::uint64_t seed) {
    Vector xi(dom.bulk_size());
    for (int i = 0; i < dom.bulk_size(); ++i) xi[i] = counter_uniform(seed, static_cast<std::uint64_t>(i));
    FieldPair u = space.project_zero_mean(FieldPair::from_bulk(dom, std::move(xi)));
    u *= amplitude;
    u.bulk.array() += mean;
    u.boundary.array() += mean;
    return u;
}

FieldPair table_initial(const DiscreteDomain& dom, std::istream& in) {
    const CsvTable csv = read_csv(in);
    if (csv.header != std::vector<std::string>{"node", "value"}) throw ConfigError("initial table header must be 'node,value'");
    Vector bulk = Vector::Constant(dom.bulk_size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& row : csv.rows) {
        const double node = parse_double(row[0], "initial table node");
        if (node < 0 || node >= dom.bulk_size() || node != std::floor(node)) {
            throw ConfigError("initial table: node id out of range");
        }
        bulk[static_cast<int>(node)] = parse_double(row[1], "initial table value");
    }
    if (!bulk.allFinite()) throw ConfigError("initial table: every bulk node needs a finite value");
    return FieldPair::from_bulk(dom, std::move(bulk));
}

}  // namespace chbs

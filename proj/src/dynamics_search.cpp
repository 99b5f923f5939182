#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "cwlab/dynamics.hpp"

namespace cwlab {

namespace {

struct Lattice {
    long a = 0, b = 0;
};

// Signed representative of v mod n in [-n/2, n/2).
long centered(long v, long n) {
    long r = ((v % n) + n) % n;
    return r >= n / 2 ? r - n : r;
}

}  // namespace

CantorResult cantor_in_stable(const SurfaceMap& m, const CantorParams& prm, const GridSpace& space) {
    const double h = space.cell_size();
    if (!m.hyperbolic()) throw Error("map has no stable and unstable directions");
    if (space.kind() != m.space_kind()) throw Error("grid space does not match the map's surface");
    if (prm.levels < 0 || prm.levels > 4) throw Error("levels must be in [0, 4]");
    if (prm.eps < 4.0 * h) throw Error("eps below resolution floor (4 cells)");
    if (prm.orbit_budget < 1) throw Error("orbit budget must be positive");

    CantorResult out;

    // Pseudo-transitive base: the seeded candidate whose orbit visits the most
    // eps/2 boxes within the budget.
    std::mt19937_64 rng(prm.seed);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    const double box = prm.eps / 2.0;
    std::size_t best_cover = 0;
    for (int i = 0; i < 16; ++i) {
        const Point cand = m.canonical({unit01(rng), unit01(rng)});
        std::set<std::pair<long, long>> boxes;
        Point q = cand;
        for (int n = 0; n < prm.orbit_budget; ++n) {
            boxes.insert({static_cast<long>(q.x / box), static_cast<long>(q.y / box)});
            q = m.forward(q);
        }
        if (boxes.size() > best_cover) {
            best_cover = boxes.size();
            out.base = cand;
        }
    }

    // Lattice vectors w = s e_u - sigma e_s give points p + s e_u of the
    // unstable arc that sit at stable offset sigma from p modulo the lattice.
    const Point eu = m.unstable_direction(), es = m.stable_direction();
    const double det = eu.x * (-es.y) - (-es.x) * eu.y;
    auto decompose = [&](Lattice w) {
        const double s = (w.a * (-es.y) - (-es.x) * w.b) / det;
        const double sigma = (eu.x * w.b - eu.y * w.a) / det;
        return std::pair{s, sigma};
    };
    const long reach = prm.orbit_budget;
    auto search = [&](double lo, double hi) -> std::optional<std::pair<double, double>> {
        std::optional<std::pair<double, double>> best;
        for (long a = -reach; a <= reach; ++a)
            for (long b = -reach; b <= reach; ++b) {
                const auto [s, sigma] = decompose({a, b});
                if (sigma < lo || sigma > hi) continue;
                if (!best || std::abs(s) < std::abs(best->first)) best = std::pair{s, sigma};
            }
        return best;
    };

    std::vector<double> shifts;
    double prev_sigma = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= prm.levels; ++k) {
        const int rest = prm.levels - k;
        const double need = 4.0 * h * (std::pow(2.0, rest + 1) - 1.0);
        const double hi = std::min(prm.eps / std::pow(2.0, k + 1), (prev_sigma - 4.0 * h) / 2.0);
        const double lo = need;
        // Prefer offsets near the top of the window so later levels keep room.
        std::optional<std::pair<double, double>> found;
        for (double frac : {0.25, 0.5, 1.0})
            if (!found && lo <= hi) found = search(hi - frac * (hi - lo), hi);
        if (!found) {
            out.diagnostic = "doubling failed at level " + std::to_string(k) + ": no unstable-arc point with stable offset in [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "] within the orbit budget";
            break;
        }
        shifts.push_back(found->first);
        out.stable_offsets.push_back(found->second);
        prev_sigma = found->second;
        out.level_reached = k;
    }
    out.complete = out.level_reached == prm.levels;

    const std::size_t used = shifts.size();
    if (used == 0) {
        out.points.push_back(out.base);
        out.arc_parameters.push_back(0.0);
        return out;
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << used); ++mask) {
        double s = 0.0;
        for (std::size_t k = 0; k < used; ++k)
            if (mask & (std::size_t{1} << k)) s += shifts[k];
        out.arc_parameters.push_back(s);
        out.points.push_back(m.canonical({out.base.x + s * eu.x, out.base.y + s * eu.y}));
    }
    if (out.complete && joint_stability(m, out.points, prm.horizon) > prm.eps) {
        out.complete = false;
        out.diagnostic = "points are not jointly eps-stable at the working horizon";
    }
    return out;
}

CapacitorResult capacitor_cross(const SurfaceMap& m, const CellSet& a, const CellSet& b, const CellSet& g, double r,
                                Point x, double delta, int horizon, const GridSpace& space) {
    if (a.empty() || b.empty() || g.empty()) throw Error("capacitor parts must be nonempty");
    if (!a.intersect(b).empty()) throw Error("plates not disjoint");
    const CellSet plates = a.unite(b);
    const CellSet closure = g.unite(plates);
    const CellSet near = ball(space, x, r);

    const auto gmask = g.mask();
    const auto pmask = plates.mask();
    for (CellIndex c : near.cells()) {
        if (gmask[static_cast<std::size_t>(c)]) continue;
        bool touches = false;
        space.for_each_neighbor4(c, [&](CellIndex n) { touches = touches || gmask[static_cast<std::size_t>(n)]; });
        if (touches && !pmask[static_cast<std::size_t>(c)])
            throw Error("boundary of G inside B_r(x) is not contained in the plates");
    }

    const auto dist_plates = distance_transform(plates);
    for (CellIndex c : g.cells())
        if (dist_plates.at(c) > delta) throw Error("G is not within delta of the plates");

    // gamma: shortest path from A to B through clos(G) within B_{r/2}(x).
    const CellSet inner = closure.intersect(ball(space, x, r / 2.0));
    const auto imask = inner.mask();
    const auto amask = a.mask(), bmask = b.mask();
    std::vector<CellIndex> parent(static_cast<std::size_t>(space.cell_count()), -2);
    std::deque<CellIndex> queue;
    for (CellIndex c : inner.cells())
        if (amask[static_cast<std::size_t>(c)]) {
            parent[static_cast<std::size_t>(c)] = -1;
            queue.push_back(c);
        }
    CellIndex hit = -1;
    while (!queue.empty() && hit < 0) {
        const CellIndex c = queue.front();
        queue.pop_front();
        if (bmask[static_cast<std::size_t>(c)]) {
            hit = c;
            break;
        }
        space.for_each_neighbor8(c, [&](CellIndex n) {
            const auto i = static_cast<std::size_t>(n);
            if (imask[i] && parent[i] == -2) {
                parent[i] = c;
                queue.push_back(n);
            }
        });
    }
    if (hit < 0) throw Error("no continuum in clos(G) near x joins the plates");
    std::vector<CellIndex> gamma;
    for (CellIndex c = hit; c >= 0; c = parent[static_cast<std::size_t>(c)]) gamma.push_back(c);
    std::reverse(gamma.begin(), gamma.end());

    const CellSet region = closure.intersect(near);
    const CellSet grown_a = a.unite(CellSet(space, [&] {
        std::vector<CellIndex> v;
        for (CellIndex c : a.cells()) space.for_each_neighbor8(c, [&](CellIndex n) { v.push_back(n); });
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }()));
    const CellSet grown_b = b.unite(CellSet(space, [&] {
        std::vector<CellIndex> v;
        for (CellIndex c : b.cells()) space.for_each_neighbor8(c, [&](CellIndex n) { v.push_back(n); });
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }()));

    // Visit gamma in bisection order: midpoint, then quarter points, and so on.
    CapacitorResult res;
    std::vector<std::pair<std::size_t, std::size_t>> level{{0, gamma.size()}};
    std::vector<std::uint8_t> tried(gamma.size(), 0);
    for (int depth = 0; !level.empty(); ++depth) {
        res.deepest_level = depth;
        std::vector<std::pair<std::size_t, std::size_t>> next;
        for (auto [lo, hi] : level) {
            if (lo >= hi) continue;
            const std::size_t mid = lo + (hi - lo) / 2;
            if (!tried[mid]) {
                tried[mid] = 1;
                ++res.samples_tried;
                const CellIndex c = gamma[mid];
                const auto pl = finite_horizon_plaque(m, {space.center(c), delta, horizon, Direction::Unstable}, space);
                const CellSet local = pl.cells.set().intersect(region);
                for (const auto& comp : components(local)) {
                    if (!comp.set().contains(c)) continue;
                    if (!comp.set().intersect(grown_a).empty() && !comp.set().intersect(grown_b).empty()) {
                        res.crossing = comp;
                        res.note = "crossing found from gamma sample " + std::to_string(mid);
                        return res;
                    }
                }
            }
            next.push_back({lo, mid});
            next.push_back({mid + 1, hi});
        }
        level = std::move(next);
    }
    res.note = "no unstable crossing found along gamma";
    return res;
}

ExpansivityFloor expansivity_floor(const SurfaceMap& m, int horizon, const GridSpace& space) {
    if (space.kind() != m.space_kind()) throw Error("grid space does not match the map's surface");
    if (horizon < 0) throw Error("horizon must be non-negative");
    const long n = space.resolution();
    const double h = space.cell_size();
    const auto& mat = m.matrix();
    const int det = mat[0] * mat[3] - mat[1] * mat[2];
    const std::array<long, 4> fwd{mat[0], mat[1], mat[2], mat[3]};
    const std::array<long, 4> bwd{det * mat[3], -det * mat[1], -det * mat[2], det * mat[0]};
    const int span = 2 * horizon + 1;

    // Cells are lattice points (i + 1/2, j + 1/2) / n of the covering torus.
    // For the linear dynamics the distance of two orbits at time k depends only
    // on M^k of their difference (and, on the sphere, of their sum).
    auto apply = [&](const std::array<long, 4>& t, Lattice w) {
        return Lattice{centered(t[0] * w.a + t[1] * w.b, n), centered(t[2] * w.a + t[3] * w.b, n)};
    };
    auto profile = [&](Lattice w) {
        std::vector<double> g(static_cast<std::size_t>(span));
        g[static_cast<std::size_t>(horizon)] = std::hypot(static_cast<double>(w.a), static_cast<double>(w.b)) * h;
        Lattice f = w, b = w;
        for (int k = 1; k <= horizon; ++k) {
            f = apply(fwd, f);
            b = apply(bwd, b);
            g[static_cast<std::size_t>(horizon + k)] = std::hypot(static_cast<double>(f.a), static_cast<double>(f.b)) * h;
            g[static_cast<std::size_t>(horizon - k)] = std::hypot(static_cast<double>(b.a), static_cast<double>(b.b)) * h;
        }
        return g;
    };

    // Pairs related by a translation: sup over time of |M^k v|.
    double best = std::numeric_limits<double>::infinity();
    for (long radius = 4;; radius *= 2) {
        const long lim = std::min(radius, n / 2);
        for (long a = -lim; a <= lim; ++a)
            for (long b = -lim; b <= lim; ++b) {
                if ((a == 0 && b == 0) || std::hypot(a, b) > static_cast<double>(lim)) continue;
                const auto g = profile({a, b});
                best = std::min(best, *std::max_element(g.begin(), g.end()));
            }
        if (static_cast<double>(lim) * h >= best || lim == n / 2) break;
    }

    if (m.quotient()) {
        // Pairs a, b with u = a + b and v = a - b: the quotient distance at time k
        // is min(|M^k u|, |M^k v|). Cell centers force u + v to be odd in both
        // coordinates.
        auto exists = [&](double t) {
            const long rad = static_cast<long>(std::floor(t / h));
            const std::uint32_t full = (span >= 32) ? 0xffffffffu : ((1u << span) - 1u);
            std::unordered_map<long long, std::uint32_t> masks;
            for (long a = -rad; a <= rad; ++a)
                for (long b = -rad; b <= rad; ++b) {
                    if ((a == 0 && b == 0) || std::hypot(a, b) * h > t) continue;
                    Lattice z{a, b};
                    for (int k = 0; k <= horizon; ++k) {
                        for (const auto* dir : {&fwd, &bwd}) {
                            // z at time k comes from M^-k z (forward) or M^k z (backward).
                            Lattice w = z;
                            for (int i = 0; i < k; ++i) w = apply(dir == &fwd ? bwd : fwd, w);
                            const long long key = (static_cast<long long>(w.a) + n) * (2 * n + 1) + (w.b + n);
                            if (masks.count(key)) continue;
                            const auto g = profile(w);
                            std::uint32_t bits = 0;
                            for (int s = 0; s < span; ++s)
                                if (g[static_cast<std::size_t>(s)] <= t) bits |= 1u << s;
                            masks[key] = bits;
                        }
                    }
                }
            std::map<std::pair<std::uint32_t, int>, bool> kinds;
            for (const auto& [key, bits] : masks) {
                const long a = key / (2 * n + 1) - n, b = key % (2 * n + 1) - n;
                const int parity = static_cast<int>(((a % 2) + 2) % 2 * 2 + ((b % 2) + 2) % 2);
                if (bits == full) return true;
                kinds[{bits, parity}] = true;
            }
            for (auto i = kinds.begin(); i != kinds.end(); ++i)
                for (auto j = i; j != kinds.end(); ++j)
                    if ((i->first.first | j->first.first) == full && (i->first.second ^ j->first.second) == 3) return true;
            return false;
        };
        long lo = 0, hi = static_cast<long>(std::ceil(best / h - 1e-9));
        // Smallest k with some pair staying within k*h.
        while (lo + 1 < hi) {
            const long mid = (lo + hi) / 2;
            if (exists(static_cast<double>(mid) * h + 1e-12))
                hi = mid;
            else
                lo = mid;
        }
        best = std::min(best, static_cast<double>(hi) * h);
    }

    const long k = static_cast<long>(std::ceil(best / h - 1e-9)) - 1;
    ExpansivityFloor out;
    out.resolution = static_cast<int>(n);
    out.at_grid_floor = k < 1;
    out.value = std::max<long>(k, 1) * h;
    return out;
}

}  // namespace cwlab

#include "finepot/swiss_cheese.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"

namespace finepot {

namespace {

constexpr int kMarginGenerations = 40;

double lattice_step(int k) { return std::ldexp(1.0, -k); }

// Nearest point of ((0,1) cap 2^-k Z)^n, coordinatewise.
double nearest_distance2(std::span<const double> x, int k) {
    const double a = lattice_step(k);
    const double top = 1.0 - a;
    double d2 = 0.0;
    for (double xi : x) {
        double q = std::clamp(std::round(xi / a) * a, a, top);
        d2 += (xi - q) * (xi - q);
    }
    return d2;
}

// sum_{j >= j0} rho^j with rho = 2^-beta
double geometric_tail(double beta, int j0) {
    return std::exp2(-beta * j0) / -std::expm1(-beta * std::numbers::ln2);
}

double thinness_rate(const SwissCheeseSpec& s) {
    const double n = s.n;
    if (s.regime() == CheeseRegime::Subcritical) return (s.alpha * (1.0 - s.theta) - 1.0) * (n - s.p) / (s.p - 1.0);
    return s.alpha * (1.0 - s.theta);
}

double thinness_prefactor(const SwissCheeseSpec& s) {
    if (s.regime() == CheeseRegime::Subcritical) return std::pow(s.delta, (s.n - s.p) / (s.p - 1.0));
    return 1.0;
}

double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

} // namespace

const char* to_string(CheeseRegime regime) noexcept {
    return regime == CheeseRegime::Subcritical ? "subcritical" : "critical";
}

void validate(const SwissCheeseSpec& s) {
    auto bad = [](const std::string& msg) { fail(ErrorKind::InvalidArgument, msg); };
    if (s.n < 2) bad("swiss cheese requires n >= 2");
    if (!(s.p > 1.0)) bad("swiss cheese requires p > 1");
    if (s.p > s.n) bad("swiss cheese requires p <= n");
    if (!(s.delta > 0.0 && s.delta < 0.5)) bad("swiss cheese requires 0 < δ < 1/2");
    if (s.k_max < 1) bad("swiss cheese requires K_max >= 1");
    const double n = s.n;
    std::ostringstream os;
    if (s.regime() == CheeseRegime::Subcritical) {
        double bound = n / (n - s.p);
        if (!(s.alpha > bound)) {
            os << "swiss cheese requires α > n/(n−p): got α = " << s.alpha << ", n/(n−p) = " << bound;
            bad(os.str());
        }
        if (!(s.theta > 0.0 && s.theta < 1.0 - 1.0 / s.alpha)) {
            os << "swiss cheese requires 0 < θ < 1 − 1/α: got θ = " << s.theta << ", 1 − 1/α = " << 1.0 - 1.0 / s.alpha;
            bad(os.str());
        }
    } else {
        double bound = n / (n - 1.0);
        if (!(s.alpha > bound)) {
            os << "swiss cheese requires α > n/(n−1) when p = n: got α = " << s.alpha << ", n/(n−1) = " << bound;
            bad(os.str());
        }
        if (!(s.theta > 0.0 && s.theta < 1.0)) {
            os << "swiss cheese requires 0 < θ < 1 when p = n: got θ = " << s.theta;
            bad(os.str());
        }
    }
}

SwissCheese::SwissCheese(const SwissCheeseSpec& spec, std::optional<int> generations) : spec_(spec) {
    validate(spec_);
    generations_ = generations.value_or(spec_.k_max);
    require(generations_ >= 0 && generations_ <= spec_.k_max, "generation count outside 0..K_max");
}

double SwissCheese::radius(int k) const {
    require(k >= 1, "generations start at 1");
    if (spec_.regime() == CheeseRegime::Subcritical) return spec_.delta * std::exp2(-k * spec_.alpha);
    return spec_.delta * std::exp2(-std::exp2(k * spec_.alpha));
}

bool SwissCheese::contains(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == spec_.n, "point has wrong dimension");
    for (double xi : x)
        if (!(xi >= 0.0 && xi <= 1.0)) return false;
    for (int k = 1; k <= generations_; ++k) {
        double r = radius(k);
        if (nearest_distance2(x, k) < r * r) return false;
    }
    return true;
}

double SwissCheese::margin(std::span<const double> x, std::optional<int> generations) const {
    require(static_cast<int>(x.size()) == spec_.n, "point has wrong dimension");
    for (double xi : x)
        if (!(xi >= 0.0 && xi <= 1.0)) return -std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    const int last = generations.value_or(kMarginGenerations);
    require(last >= 1, "margin needs at least one generation");
    for (int k = 1; k <= last; ++k) {
        double a = lattice_step(k);
        double gap = std::sqrt(nearest_distance2(x, k)) - radius(k);
        m = std::min(m, gap / std::pow(a, 1.0 + spec_.theta));
    }
    return m;
}

std::optional<double> SwissCheese::tail(std::span<const double> x, int j_next) const {
    double eps = margin(x);
    if (!(eps > 0.0)) return std::nullopt;
    eps = std::min(eps, spec_.delta * (1.0 - 1e-12));
    const double theta2 = spec_.theta * spec_.theta;
    int j_eps = std::max(1, static_cast<int>(std::ceil(-std::log2(eps) / theta2)));
    // Terms before j_eps are only known to be at most ln 2.
    double uncovered = std::max(0, j_eps - j_next);
    int j0 = std::max(j_next, j_eps);
    return std::numbers::ln2 * (uncovered + thinness_prefactor(spec_) * geometric_tail(thinness_rate(spec_), j0));
}

CheeseWindow SwissCheese::window(std::span<const double> center, double half_width, double h) const {
    require(static_cast<int>(center.size()) == spec_.n, "window center has wrong dimension");
    require(half_width > 0.0 && h > 0.0, "window needs positive size and spacing");
    auto m = std::llround(half_width / h);
    require(m >= 1, "window narrower than one cell");
    std::vector<double> lo(center.begin(), center.end()), hi(center.begin(), center.end());
    for (auto& v : lo) v -= static_cast<double>(m) * h;
    for (auto& v : hi) v += static_cast<double>(m) * h;
    CheeseWindow w;
    w.space = build_grid(spec_.n, lo, hi, h);
    w.E = region(*w.space, [&](std::span<const double> y) { return contains(y); });
    std::vector<std::int64_t> mid(static_cast<std::size_t>(spec_.n), m);
    w.center_vertex = w.space->grid()->index(mid);
    return w;
}

std::size_t count_removed_vertices(const SwissCheeseSpec& spec, int generations, double h) {
    SwissCheese cheese(spec, generations);
    const int n = spec.n;
    const auto top = static_cast<std::int64_t>(std::floor(1.0 / h + 1e-9));
    std::map<std::vector<std::int64_t>, std::vector<std::pair<std::int64_t, std::int64_t>>> rows;
    std::vector<std::int64_t> key(static_cast<std::size_t>(n - 1));

    for (int k = 1; k <= generations; ++k) {
        const double a = lattice_step(k), r = cheese.radius(k);
        if (r <= 0.0) continue;
        const std::int64_t side = (std::int64_t{1} << k) - 1;
        std::vector<std::int64_t> t(static_cast<std::size_t>(n), 1);
        while (true) {
            // Centers shared with a coarser generation sit inside its larger ball.
            bool coarse = k > 1 && std::all_of(t.begin(), t.end(), [](std::int64_t v) { return v % 2 == 0; });
            if (!coarse) {
                std::vector<double> q(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) q[i] = static_cast<double>(t[i]) * a;
                auto emit = [&](auto&& self, int axis, double used) -> void {
                    double rem = r * r - used;
                    if (rem <= 0.0) return;
                    double s = std::sqrt(rem);
                    auto lo = static_cast<std::int64_t>(std::floor((q[axis] - s) / h)) + 1;
                    auto hi = static_cast<std::int64_t>(std::ceil((q[axis] + s) / h)) - 1;
                    lo = std::max<std::int64_t>(lo, 0);
                    hi = std::min(hi, top);
                    if (axis == n - 1) {
                        if (lo <= hi) rows[key].emplace_back(lo, hi);
                        return;
                    }
                    for (auto i = lo; i <= hi; ++i) {
                        double d = static_cast<double>(i) * h - q[axis];
                        key[axis] = i;
                        self(self, axis + 1, used + d * d);
                    }
                };
                emit(emit, 0, 0.0);
            }
            int axis = 0;
            while (axis < n && ++t[axis] > side) t[axis++] = 1;
            if (axis == n) break;
        }
    }

    std::size_t count = 0;
    for (auto& [row, iv] : rows) {
        std::sort(iv.begin(), iv.end());
        std::int64_t cur_lo = iv.front().first, cur_hi = iv.front().second;
        for (std::size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first > cur_hi + 1) {
                count += static_cast<std::size_t>(cur_hi - cur_lo + 1);
                cur_lo = iv[i].first;
                cur_hi = iv[i].second;
            } else {
                cur_hi = std::max(cur_hi, iv[i].second);
            }
        }
        count += static_cast<std::size_t>(cur_hi - cur_lo + 1);
    }
    return count;
}

SwissCheeseReport swiss_cheese_report(const SwissCheeseSpec& spec, double h, int terms, bool count_grid) {
    validate(spec);
    require(std::isfinite(h) && h > 0.0 && h < 1.0, "grid spacing must lie in (0, 1)");
    require(terms >= 1, "at least one majorant term is needed");
    SwissCheese full(spec);
    SwissCheeseReport rep;
    rep.spec = spec;
    rep.regime = spec.regime();
    rep.h = h;
    const double n = spec.n;

    for (int k = 1; k <= spec.k_max; ++k) {
        rep.radii.push_back(full.radius(k));
        if (full.radius(k) >= 4.0 * h) rep.k_effective = k;
    }
    rep.truncated = rep.k_effective < spec.k_max;
    if (rep.truncated) {
        std::ostringstream os;
        os << "generations " << rep.k_effective + 1 << ".." << spec.k_max << " have r_k < 4h = " << 4.0 * h
           << " and are not modelled on the grid";
        rep.disclosure = os.str();
    }

    rep.measure_constant = unit_ball_volume(spec.n) * std::pow(1.0 + std::sqrt(n) / 8.0, n);
    for (int k = 1; k <= spec.k_max; ++k) {
        double count = std::pow(std::exp2(k) - 1.0, n);
        double term = count * std::pow(full.radius(k), n);
        rep.measure_terms.push_back(term);
        rep.measure_partial += term;
    }
    const int K = spec.k_max;
    if (rep.regime == CheeseRegime::Subcritical) {
        // (2^k - 1)^n r_k^n <= delta^n 2^(kn(1 - alpha))
        rep.measure_tail = std::pow(spec.delta, n) * geometric_tail(n * (spec.alpha - 1.0), K + 1);
    } else {
        auto log2_b = [&](int k) { return n * std::log2(spec.delta) + k * n - n * std::exp2(k * spec.alpha); };
        double ratio = std::exp2(log2_b(K + 2) - log2_b(K + 1));
        rep.measure_tail = std::exp2(log2_b(K + 1)) / (1.0 - ratio);
    }
    rep.measure_bound = rep.measure_constant * (rep.measure_partial + rep.measure_tail);

    if (count_grid) {
        rep.grid_removed_vertices = count_removed_vertices(spec, rep.k_effective, h);
        rep.grid_complement_measure = static_cast<double>(rep.grid_removed_vertices) * std::pow(h, n);
    }

    const bool sub = rep.regime == CheeseRegime::Subcritical;
    const double decay = sub ? spec.alpha * (n - spec.p) : spec.alpha * (n - 1.0);
    const double scale = sub ? std::pow(spec.delta, n - spec.p) : 1.0;
    for (int j = 1; j <= terms; ++j) {
        CapacityMajorantRow row;
        row.j = j;
        for (int k = static_cast<int>(std::floor((1.0 - spec.theta) * j)) + 1; k < j; ++k)
            if (k > (1.0 - spec.theta) * j) row.small_k_sum += scale * std::exp2(-k * decay);
        row.small_k_bound = scale * std::exp2(-j * (1.0 - spec.theta) * decay) / -std::expm1(-decay * std::numbers::ln2);
        row.large_k_sum = scale * std::exp2(-j * decay) / -std::expm1((n - decay) * std::numbers::ln2);
        rep.capacity_rows.push_back(row);
    }

    rep.thinness_rate = thinness_rate(spec);
    rep.thinness_ratio = std::exp2(-rep.thinness_rate);
    rep.thinness_prefactor = thinness_prefactor(spec);
    const double one_minus = -std::expm1(-rep.thinness_rate * std::numbers::ln2);
    for (int J = 1; J <= terms; ++J)
        rep.thinness_partial.push_back(rep.thinness_ratio * -std::expm1(-J * rep.thinness_rate * std::numbers::ln2) / one_minus);
    rep.thinness_total = rep.thinness_ratio / one_minus;
    return rep;
}

SwissCheeseResult swiss_cheese(const SwissCheeseSpec& spec, double h, std::size_t max_vertices) {
    auto rep = swiss_cheese_report(spec, h);
    SwissCheeseResult out{SwissCheese(spec, rep.k_effective), std::move(rep), nullptr, VertexSet{}};
    auto side = static_cast<std::size_t>(std::floor(1.0 / h + 1e-9)) + 1;
    double total = std::pow(static_cast<double>(side), spec.n);
    double len = static_cast<double>(side - 1) * h;
    if (total <= static_cast<double>(max_vertices) && std::abs(len - 1.0) <= 1e-9) {
        std::vector<double> lo(static_cast<std::size_t>(spec.n), 0.0), hi(static_cast<std::size_t>(spec.n), 1.0);
        out.space = build_grid(spec.n, lo, hi, h);
        out.E = region(*out.space, [&](std::span<const double> y) { return out.cheese.contains(y); });
    }
    return out;
}

} // namespace finepot

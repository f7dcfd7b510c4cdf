#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gauge/limits.hpp"
#include "gauge/mc.hpp"
#include "gauge/summation.hpp"

namespace gauge {

ControlFunction1D rescale(const ControlFunction1D& phi, double alpha, double beta) {
    if (!(alpha > 0.0)) throw std::invalid_argument(fmt::format("rescale needs alpha > 0, got {}", alpha));
    std::vector<Jump> jumps;
    for (const auto& j : phi.jumps()) jumps.push_back({j.at, alpha * j.left + beta, alpha * j.right + beta});
    return ControlFunction1D::from_function([phi, alpha, beta](double x) { return alpha * phi(x) + beta; },
                                            fmt::format("{} * ({}) + {}", alpha, phi.description(), beta),
                                            [phi, alpha](double y, double x) { return alpha * phi.difference(y, x); },
                                            std::move(jumps));
}

ControlFunction1D combine_controls(CombineMode mode, const ControlFunction1D& phi, const ControlFunction1D& psi,
                                   const std::optional<PointFunction>& F,
                                   std::optional<std::pair<double, double>> domain, std::size_t samples) {
    if (mode == CombineMode::SumWithIdentity) {
        return ControlFunction1D::from_function(
            [phi, psi](double x) { return phi(x) + psi(x) + x; },
            fmt::format("({}) + ({}) + x", phi.description(), psi.description()),
            [phi, psi](double y, double x) { return phi.difference(y, x) + psi.difference(y, x) + (y - x); });
    }
    if (!F) throw std::invalid_argument("compose mode needs the inner function F");
    if (!domain) throw std::invalid_argument("compose mode needs the domain of F");
    if (samples < 2) throw std::invalid_argument("compose mode needs at least two samples");
    const auto [a, b] = *domain;
    double prev_x = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        // Open interval: skip the endpoints.
        const double x = a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
        const double v = (*F)(x);
        if (i > 0 && !(v > prev))
            throw InvalidControl(fmt::format("F = {} does not increase between {:.17g} and {:.17g}", F->name(), prev_x, x));
        prev_x = x;
        prev = v;
    }
    const PointFunction inner = *F;
    return ControlFunction1D::from_function(
        [phi, psi, inner](double x) { return psi(inner(x)) + phi(x); },
        fmt::format("({}) o ({}) + ({})", psi.description(), inner.name(), phi.description()),
        [phi, psi, inner](double y, double x) { return psi.difference(inner(y), inner(x)) + phi.difference(y, x); });
}

GluedControl glue_controls(const Primitive1D& F1, const ControlFunction1D& phi1, const Primitive1D& F2,
                           const ControlFunction1D& phi2, double a, double b, double c) {
    if (!(a < b && b < c)) throw std::invalid_argument("glue_controls needs a < b < c");
    LimitOptions left_opts, right_opts;
    left_opts.h0 = std::min(1e-3, (b - a) / 4.0);
    right_opts.h0 = std::min(1e-3, (c - b) / 4.0);
    GluedControl g{Primitive1D{}, ControlFunction1D::identity()};
    g.F1_left = one_sided_limit(F1.value, b, Side::Left, left_opts).value;
    g.F2_right = one_sided_limit(F2.value, b, Side::Right, right_opts).value;
    g.phi1_left = one_sided_limit([&](double x) { return phi1(x); }, b, Side::Left, left_opts).value;
    g.phi2_right = one_sided_limit([&](double x) { return phi2(x); }, b, Side::Right, right_opts).value;

    const double f1 = g.F1_left, f2 = g.F2_right, p1 = g.phi1_left, p2 = g.phi2_right;
    auto F = [F1, F2, b, f1, f2](double x) {
        if (x < b) return F1.value(x) - f1;
        if (x > b) return F2.value(x) - f2;
        return 0.0;
    };
    auto Fdiff = [F1, F2, F, b](double y, double x) {
        if (x < b && y < b) return F1.difference(y, x);
        if (x > b && y > b) return F2.difference(y, x);
        return F(y) - F(x);
    };
    g.F = {F, Fdiff, fmt::format("glue of {} and {} at {:.17g}", F1.description, F2.description, b)};

    auto phi = [phi1, phi2, b, p1, p2](double x) {
        if (x < b) return phi1(x) - p1 - 1.0;
        if (x > b) return phi2(x) - p2 + 1.0;
        return 0.0;
    };
    auto phidiff = [phi1, phi2, phi, b](double y, double x) {
        if (x < b && y < b) return phi1.difference(y, x);
        if (x > b && y > b) return phi2.difference(y, x);
        return phi(y) - phi(x);
    };
    g.phi = ControlFunction1D::from_function(phi, fmt::format("glue of {} and {} with a jump at {:.17g}",
                                                              phi1.description(), phi2.description(), b),
                                             phidiff, {Jump{b, -1.0, 1.0}});
    return g;
}

BoundedControl bounded_control(const std::vector<ControlFunction1D>& phis, const std::vector<double>& a,
                               const std::vector<double>& b, int K) {
    if (phis.empty() || phis.size() != a.size() || phis.size() != b.size())
        throw std::invalid_argument("bounded_control needs equally many controls and endpoints");
    if (K < 1) throw std::invalid_argument("truncation K must be positive");
    const std::size_t n = std::min<std::size_t>(phis.size(), static_cast<std::size_t>(K));
    struct Piece {
        ControlFunction1D phi;
        double a, b, lo, range, weight;
    };
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(a[k] < b[k])) throw std::invalid_argument(fmt::format("empty interval ({}, {}) at k = {}", a[k], b[k], k + 1));
        if (k > 0 && !(a[k] < a[k - 1] && b[k] > b[k - 1]))
            throw std::invalid_argument("a_k must decrease and b_k increase strictly");
        const auto& phi = phis[k];
        double prev = phi(a[k]);
        for (int i = 1; i <= 64; ++i) {
            const double x = a[k] + (b[k] - a[k]) * i / 64.0;
            const double v = phi(x);
            if (!(v > prev)) throw InvalidControl(fmt::format("phi_{} does not increase near {:.17g}", k + 1, x));
            prev = v;
        }
        const double lo = phi(a[k]);
        pieces.push_back({phi, a[k], b[k], lo, phi(b[k]) - lo, std::ldexp(1.0, -static_cast<int>(k) - 1)});
    }
    auto shared = std::make_shared<const std::vector<Piece>>(std::move(pieces));
    auto psi = [](const Piece& p, double x) {
        if (x <= p.a) return 0.0;
        if (x >= p.b) return 1.0;
        return (p.phi(x) - p.lo) / p.range;
    };
    auto value = [shared, psi](double x) {
        std::vector<double> t;
        for (const auto& p : *shared) t.push_back(p.weight * psi(p, x));
        return pairwise_sum(t);
    };
    auto difference = [shared](double y, double x) {
        std::vector<double> t;
        for (const auto& p : *shared) {
            const double cy = std::clamp(y, p.a, p.b), cx = std::clamp(x, p.a, p.b);
            if (cy == cx) continue;
            t.push_back(p.weight * p.phi.difference(cy, cx) / p.range);
        }
        return pairwise_sum(t);
    };
    const double tail = std::ldexp(1.0, -static_cast<int>(n));
    auto headroom = [shared, tail](double x) {
        std::vector<double> t{tail};
        for (const auto& p : *shared) {
            if (x >= p.b) continue;
            t.push_back(x <= p.a ? p.weight : p.weight * p.phi.difference(p.b, x) / p.range);
        }
        return pairwise_sum(t);
    };
    BoundedControl out{ControlFunction1D::from_function(value, fmt::format("bounded series of {} controls", n),
                                                        difference)
                           .with_headroom(headroom),
                       std::ldexp(1.0, -K)};
    return out;
}

MctControl mct_control(const MctInput& in, int K, const std::vector<double>& check_points) {
    if (K < 2) throw std::invalid_argument("mct_control needs K >= 2");
    if (!(in.a < in.b)) throw std::invalid_argument("mct_control needs a < b");
    for (int k = 1; k < K; ++k) {
        const PointFunction fk = in.f_k(k), fk1 = in.f_k(k + 1);
        for (double x : check_points)
            if (fk(x) > fk1(x))
                throw std::invalid_argument(fmt::format("f_{} > f_{} at {:.17g}: the sequence is not monotone", k, k + 1, x));
    }
    LimitOptions opts;
    opts.h0 = std::min(1e-3, (in.b - in.a) / 4.0);
    auto endpoint_integral = [&](const Primitive1D& F) {
        try {
            const double lo = one_sided_limit(F.value, in.a, Side::Right, opts).value;
            const double hi = one_sided_limit(F.value, in.b, Side::Left, opts).value;
            return std::pair{lo, hi - lo};
        } catch (const LimitDivergence& e) {
            throw MctDivergence(std::string("endpoint limit of ") + F.description + " diverges: " + e.what());
        }
    };

    MctControl out{ControlFunction1D::identity(), {}, {}};
    std::vector<Primitive1D> F(static_cast<std::size_t>(K) + 1);
    std::vector<double> base(static_cast<std::size_t>(K) + 1);
    for (int k = 1; k <= K; ++k) {
        F[k] = in.F_k(k);
        auto [lo, L] = endpoint_integral(F[k]);
        base[k] = lo;
        out.endpoint_integrals.push_back(L);
    }
    const auto& Lk = out.endpoint_integrals;
    auto L_at = [&](int k) { return Lk[static_cast<std::size_t>(k) - 1]; };
    const double inc_late = L_at(K) - L_at((K + 1) / 2);
    const double inc_early = L_at((K + 1) / 2) - L_at((K + 3) / 4);
    if (inc_late > 0.0 && inc_late >= 0.75 * inc_early)
        throw MctDivergence(fmt::format("integrals keep growing: {:.6g} at k = {}, {:.6g} at k = {}, {:.6g} at k = {}",
                                        L_at((K + 3) / 4), (K + 3) / 4, L_at((K + 1) / 2), (K + 1) / 2, L_at(K), K));
    auto [F_base, L] = endpoint_integral(in.F);
    out.limit_integral = L;

    int prev = 0;
    for (int j = 1;; ++j) {
        int chosen = 0;
        for (int k = prev + 1; k <= K; ++k)
            if (L_at(k) > L - std::ldexp(1.0, -j)) {
                chosen = k;
                break;
            }
        if (chosen == 0) break;
        out.subsequence.push_back(chosen);
        prev = chosen;
    }
    const int J = static_cast<int>(out.subsequence.size());
    out.tail_phi = std::ldexp(1.0, -J);
    out.tail_F = (J + 2) * std::ldexp(1.0, -J);

    struct Term {
        ControlFunction1D phi;
        Primitive1D Fk;
        double base;
        double weight;
        int j;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    for (int j = 1; j <= J; ++j) {
        const int k = out.subsequence[static_cast<std::size_t>(j) - 1];
        terms->push_back({in.phi_k(k), F[k], base[k], std::ldexp(1.0, -j), j});
    }
    const Primitive1D Fl = in.F;
    const double Fb = F_base;
    auto value = [terms, Fl, Fb](double x) {
        std::vector<double> t;
        const double Fx = Fl.value(x) - Fb;
        for (const auto& term : *terms) {
            t.push_back(term.weight * term.phi(x));
            t.push_back(term.j * (Fx - (term.Fk.value(x) - term.base)));
        }
        t.push_back(x);
        return pairwise_sum(t);
    };
    auto difference = [terms, Fl](double y, double x) {
        std::vector<double> t;
        const double dF = Fl.difference(y, x);
        for (const auto& term : *terms) {
            t.push_back(term.weight * term.phi.difference(y, x));
            t.push_back(term.j * (dF - term.Fk.difference(y, x)));
        }
        t.push_back(y - x);
        return pairwise_sum(t);
    };
    out.phi = ControlFunction1D::from_function(value, fmt::format("monotone convergence series over {} terms", J),
                                               difference);
    return out;
}

}  // namespace gauge

#include "graphnls/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "graphnls/special.hpp"

namespace graphnls {

namespace {
constexpr double TWO_PI = 2.0 * M_PI;
using std::complex;
} // namespace

cplx char_residual(cplx lambda, const SpectralParams& p) {
    cplx wt = -p.sigma - cplx(0.0, p.c) * lambda;
    return 9.0 * cos_sqrt(wt, TWO_PI) - cos_sqrt(wt, 2.0 * (M_PI - p.L2)) -
           8.0 * std::cosh(TWO_PI * lambda);
}

cplx char_residual_d(cplx lambda, const SpectralParams& p) {
    cplx wt = -p.sigma - cplx(0.0, p.c) * lambda;
    // d/dwt cos(a sqrt(wt)) = -(a/2) sinc_sqrt(wt, a); dwt/dlambda = -i c
    cplx dF_dwt = -M_PI * 9.0 * sinc_sqrt(wt, TWO_PI) + (M_PI - p.L2) * sinc_sqrt(wt, 2.0 * (M_PI - p.L2));
    return dF_dwt * cplx(0.0, -p.c) - 8.0 * TWO_PI * std::sinh(TWO_PI * lambda);
}

RootClass classify_one(cplx lambda, double class_tol) {
    if (lambda.real() > class_tol) return RootClass::unstable;
    if (lambda.real() < -class_tol) return RootClass::stable;
    return RootClass::center;
}

std::vector<Root> roots_homogeneous(double sigma, double c, int k_min, int k_max,
                                    double class_tol) {
    std::vector<Root> out;
    for (int k = k_min; k <= k_max; ++k) {
        cplx rad = std::sqrt(cplx(sigma - 0.25 * c * c + c * k, 0.0));
        cplx base(0.0, 0.5 * c - k);
        for (int sgn : {+1, -1}) {
            Root r;
            r.lambda = base + double(sgn) * rad;
            r.family = BandFamily::generic;
            r.cls = classify_one(r.lambda, class_tol);
            r.residual = 0.0;
            out.push_back(r);
        }
    }
    return out;
}

Root flat_band_root(const SpectralParams& p, int m, double class_tol) {
    if (p.c == 0.0) fail(errc::domain, "flat-band root needs c != 0");
    double wf = flat_band_frequency(m, p.L2);
    Root r;
    r.lambda = cplx(0.0, (p.sigma + wf) / p.c);
    r.family = BandFamily::flat;
    r.cls = classify_one(r.lambda, class_tol);
    r.residual = std::abs(p.sigma + cplx(0.0, p.c) * r.lambda + wf);
    return r;
}

namespace {
// |G| is only meaningful relative to the size of its terms; the cosh term
// reaches ~1e4 already at |Re lambda| ~ 1.6, where an absolute 1e-11 target
// sits below the roundoff floor.
double residual_scale(cplx lambda) {
    double x = 2.0 * M_PI * lambda.real();
    return 1.0 + 8.0 * std::cosh(std::min(std::abs(x), 700.0));
}
} // namespace

namespace {
thread_local cplx g_last_iterate{0.0, 0.0};
} // namespace

std::optional<Root> try_newton_root(cplx guess, const SpectralParams& p,
                                    const NewtonOptions& opt) {
    cplx z = guess;
    g_last_iterate = z;
    auto make_root = [&](cplx zz, double resid) {
        Root r;
        r.lambda = zz;
        r.family = BandFamily::generic;
        r.cls = classify_one(zz);
        r.residual = resid;
        return r;
    };
    for (int it = 0; it < opt.max_iter; ++it) {
        cplx g = char_residual(z, p);
        if (std::abs(g) <= opt.tol * residual_scale(z)) return make_root(z, std::abs(g));
        cplx dg = char_residual_d(z, p);
        if (std::abs(dg) < 1e-15) return std::nullopt;
        z -= g / dg;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        g_last_iterate = z;
    }
    double g = std::abs(char_residual(z, p));
    if (g <= opt.tol * residual_scale(z)) return make_root(z, g);
    return std::nullopt;
}

Root newton_root(cplx guess, const SpectralParams& p, const NewtonOptions& opt) {
    auto r = try_newton_root(guess, p, opt);
    if (!r) {
        std::ostringstream os;
        os << "Newton did not reach |G| <= " << opt.tol << " from (" << guess.real() << ", "
           << guess.imag() << "); last iterate (" << g_last_iterate.real() << ", "
           << g_last_iterate.imag() << ")";
        fail(errc::numeric, os.str());
    }
    return *r;
}

std::vector<Root> grid_scan(const ScanRegion& region, const SpectralParams& p) {
    const int nx = std::max(region.nx, 2), ny = std::max(region.ny, 2);
    Eigen::MatrixXd re(nx + 1, ny + 1), im(nx + 1, ny + 1);
    for (int i = 0; i <= nx; ++i) {
        double x = region.re_min + (region.re_max - region.re_min) * i / nx;
        for (int j = 0; j <= ny; ++j) {
            double y = region.im_min + (region.im_max - region.im_min) * j / ny;
            cplx g = char_residual(cplx(x, y), p);
            re(i, j) = g.real();
            im(i, j) = g.imag();
        }
    }
    auto sign_change = [](double a, double b, double c, double d) {
        double mx = std::max({a, b, c, d}), mn = std::min({a, b, c, d});
        return mx >= 0.0 && mn <= 0.0;
    };
    std::vector<Root> found;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (!sign_change(re(i, j), re(i + 1, j), re(i, j + 1), re(i + 1, j + 1))) continue;
            if (!sign_change(im(i, j), im(i + 1, j), im(i, j + 1), im(i + 1, j + 1))) continue;
            double x = region.re_min + (region.re_max - region.re_min) * (i + 0.5) / nx;
            double y = region.im_min + (region.im_max - region.im_min) * (j + 0.5) / ny;
            auto r = try_newton_root(cplx(x, y), p);
            if (!r) continue;
            if (r->lambda.real() < region.re_min - 1e-9 || r->lambda.real() > region.re_max + 1e-9 ||
                r->lambda.imag() < region.im_min - 1e-9 || r->lambda.imag() > region.im_max + 1e-9)
                continue;
            bool dup = false;
            for (auto& q : found)
                if (std::abs(q.lambda - r->lambda) < 1e-8) { dup = true; break; }
            if (!dup) found.push_back(*r);
        }
    }
    std::sort(found.begin(), found.end(), [](const Root& a, const Root& b) {
        if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() < b.lambda.imag();
        return a.lambda.real() < b.lambda.real();
    });
    return found;
}

RootPartition classify_roots(std::vector<Root> roots, double class_tol) {
    RootPartition part;
    for (auto& r : roots) {
        r.cls = classify_one(r.lambda, class_tol);
        switch (r.cls) {
            case RootClass::center: part.center.push_back(r); break;
            case RootClass::stable: part.stable.push_back(r); break;
            case RootClass::unstable: part.unstable.push_back(r); break;
        }
    }
    return part;
}

namespace {

void set_param(SpectralParams& p, ContParam which, double value) {
    if (which == ContParam::L1) {
        p.L1 = value;
        p.L2 = TWO_PI - value;
    } else {
        p.sigma = value;
    }
}

} // namespace

namespace {

// Two distinct roots near a collision midpoint, found from guesses perturbed
// to both sides of the imaginary axis (and along it, for collisions arriving
// from off-axis).  Newton confined to the axis cannot leave it -- G is real
// there -- which is why the perturbation is required at all.
std::optional<std::pair<cplx, cplx>> split_collision(cplx mid, double eps0, double ctol,
                                                     const SpectralParams& p) {
    const double inv = 1.0 / std::sqrt(2.0);
    std::vector<cplx> cand;
    // the separation of the emerging pair is unknown, so probe several scales
    for (double scale : {1.0, 3.0, 9.0, 27.0}) {
        double eps = eps0 * scale;
        for (cplx d : {cplx(eps, 0), cplx(-eps, 0), cplx(0, eps), cplx(0, -eps),
                       cplx(eps * inv, eps * inv), cplx(-eps * inv, -eps * inv),
                       cplx(eps * inv, -eps * inv), cplx(-eps * inv, eps * inv)}) {
            if (auto r = try_newton_root(mid + d, p)) {
                if (std::abs(r->lambda - mid) > 60.0 * eps) continue;
                bool dup = false;
                for (auto& q : cand)
                    if (std::abs(q - r->lambda) < 0.5 * ctol) { dup = true; break; }
                if (!dup) cand.push_back(r->lambda);
            }
        }
        if (cand.size() >= 2) break;
    }
    if (cand.size() < 2) return std::nullopt;
    std::sort(cand.begin(), cand.end(),
              [&](cplx a, cplx b) { return std::abs(a - mid) < std::abs(b - mid); });
    return std::pair(cand[0], cand[1]);
}

} // namespace

ContinuationResult continue_path(const std::vector<Root>& seeds,
                                 const ContinuationSchedule& schedule, SpectralParams params,
                                 const ContinuationOptions& opt) {
    if (seeds.empty()) fail(errc::domain, "continuation needs at least one seed");
    ContinuationResult res;
    const size_t n = seeds.size();
    std::vector<cplx> head(n);
    for (size_t i = 0; i < n; ++i) {
        res.paths.push_back({static_cast<int>(i), {schedule.from}, {seeds[i].lambda}});
        head[i] = seeds[i].lambda;
    }
    std::vector<std::vector<char>> in_collision(n, std::vector<char>(n, 0));

    double t = schedule.from;
    const double dt0 = (schedule.to - schedule.from) / schedule.n_steps;
    double dt = dt0;
    int halvings = 0;

    while ((dt0 > 0.0) ? (t < schedule.to - 1e-15) : (t > schedule.to + 1e-15)) {
        double t_next = t + dt;
        if ((dt0 > 0.0 && t_next > schedule.to) || (dt0 < 0.0 && t_next < schedule.to))
            t_next = schedule.to;
        SpectralParams p_next = params;
        set_param(p_next, schedule.param, t_next);

        std::vector<cplx> next(n);
        std::vector<char> failed(n, 0);
        for (size_t i = 0; i < n; ++i) {
            auto r = try_newton_root(head[i], p_next);
            double scale = 1.0 + std::abs(head[i]);
            if (!r || std::abs(r->lambda - head[i]) > opt.jump_tol * scale) {
                failed[i] = 1;
                next[i] = head[i];
            } else {
                next[i] = r->lambda;
            }
        }

        // A failed path whose previous head sat close to another path's is a
        // collision in progress (the pair crossed a double root inside this
        // step); restart both from perturbed guesses.
        for (size_t i = 0; i < n; ++i) {
            if (!failed[i]) continue;
            size_t j = n;
            double best = 1e300;
            for (size_t k = 0; k < n; ++k) {
                if (k == i) continue;
                double d = std::abs(head[i] - head[k]);
                if (d < best) { best = d; j = k; }
            }
            double ctol = opt.collision_tol_scale * (1.0 + std::abs(head[i]));
            if (j == n || best > opt.jump_tol * (1.0 + std::abs(head[i]))) continue;
            cplx mid = 0.5 * (head[i] + head[j]);
            double eps = std::max(opt.perturb_factor * ctol, 2.0 * best);
            if (auto pair = split_collision(mid, eps, ctol, p_next)) {
                auto [r0, r1] = *pair;
                double d_keep = std::abs(r0 - head[i]) + std::abs(r1 - head[j]);
                double d_swap = std::abs(r1 - head[i]) + std::abs(r0 - head[j]);
                if (d_swap < d_keep) std::swap(r0, r1);
                next[i] = r0;
                next[j] = r1;
                failed[i] = failed[j] = 0;
                if (!in_collision[std::min(i, j)][std::max(i, j)]) {
                    res.events.push_back(
                        {t_next, static_cast<int>(std::min(i, j)),
                         static_cast<int>(std::max(i, j)), mid});
                    in_collision[std::min(i, j)][std::max(i, j)] = 1;
                }
            }
        }

        // A still-failed path collided with a root outside the tracked set
        // (possible at the edges of the seed window): rescue it from a local
        // scan around the stuck head so it follows the merged pair onward.
        for (size_t i = 0; i < n; ++i) {
            if (!failed[i]) continue;
            double half = 0.25 * (1.0 + std::abs(head[i]));
            ScanRegion box{head[i].real() - half, head[i].real() + half,
                           head[i].imag() - half, head[i].imag() + half, 48, 48};
            auto local = grid_scan(box, p_next);
            double best = 1e300;
            cplx pick;
            for (auto& r : local) {
                double d = std::abs(r.lambda - head[i]);
                if (d < best) { best = d; pick = r.lambda; }
            }
            if (best <= opt.jump_tol * 4.0 * (1.0 + std::abs(head[i]))) {
                next[i] = pick;
                failed[i] = 0;
            }
        }

        if (std::find(failed.begin(), failed.end(), 1) != failed.end()) {
            if (++halvings > opt.max_halvings) {
                std::ostringstream os;
                os << "continuation lost a path near parameter " << t_next;
                fail(errc::numeric, os.str());
            }
            dt *= 0.5;
            continue;
        }
        if (std::abs(dt) < std::abs(dt0)) {
            dt = std::min(std::abs(dt0), 2.0 * std::abs(dt)) * (dt0 > 0 ? 1.0 : -1.0);
            if (halvings > 0) --halvings;
        }

        // slow collisions: two heads inside the collision tolerance
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                double ctol = opt.collision_tol_scale * (1.0 + std::abs(next[i]));
                double dist = std::abs(next[i] - next[j]);
                if (dist < ctol) {
                    cplx mid = 0.5 * (next[i] + next[j]);
                    if (!in_collision[i][j]) {
                        in_collision[i][j] = 1;
                        res.events.push_back(
                            {t_next, static_cast<int>(i), static_cast<int>(j), mid});
                    }
                    // keep trying to disentangle while the heads stay merged
                    double eps = opt.perturb_factor * ctol;
                    if (auto pair = split_collision(mid, eps, ctol, p_next)) {
                        auto [r0, r1] = *pair;
                        double d_keep = std::abs(r0 - head[i]) + std::abs(r1 - head[j]);
                        double d_swap = std::abs(r1 - head[i]) + std::abs(r0 - head[j]);
                        if (d_swap < d_keep) std::swap(r0, r1);
                        next[i] = r0;
                        next[j] = r1;
                    }
                } else if (dist > 2.0 * ctol && in_collision[i][j]) {
                    in_collision[i][j] = 0;
                }
            }
        }

        t = t_next;
        head = next;
        for (size_t i = 0; i < n; ++i) {
            res.paths[i].param.push_back(t);
            res.paths[i].lambda.push_back(head[i]);
        }
    }
    return res;
}

BifurcationData bifurcation_point(int branch, double ell0, const GraphGrid& cell) {
    const double L1 = cell.spec.L1, L2 = cell.spec.L2;
    BifurcationData bif;
    bif.branch = branch;
    bif.ell0 = ell0;
    bif.omega0 = band_frequency(ell0, branch, L1, L2);
    auto [d1, d2] = band_derivatives(ell0, bif.omega0, L1, L2);
    bif.c0 = d1;
    bif.sigma0 = -bif.omega0 + ell0 * d1;
    bif.omega_d2 = d2;
    bif.mode = bloch_eigenfunction(ell0, bif.omega0, cell);
    bif.gamma = gamma_coefficient(bif.mode, cell);
    bif.kappa = std::sqrt(2.0 / d2); // only meaningful when omega'' > 0
    if (!(d2 > 0.0)) bif.kappa = std::numeric_limits<double>::quiet_NaN();
    return bif;
}

BifurcationData bifurcation_for_speed(double c0, int branch, const GraphGrid& cell) {
    double ell0 = solve_ell_for_speed(c0, branch, cell.spec.L1, cell.spec.L2);
    return bifurcation_point(branch, ell0, cell);
}

bool has_homoclinic(const BifurcationData& bif) { return bif.omega_d2 > 0.0; }

double omega_d2_at_collision(cplx lambda_star, double sigma_star, double c, double L1,
                             double L2) {
    double ell = lambda_star.imag();
    double omega = -sigma_star + c * ell; // from sigma + i c lambda + omega = 0 at lambda = i ell
    return band_derivatives(ell, omega, L1, L2).second;
}

} // namespace graphnls

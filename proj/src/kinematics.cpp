#include "defectgeo/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace defectgeo {

namespace {

FormField iota(int a, const FormField& f) { return interior(FrameIndex(a + 1), f); }

FramePtr frame_of(const DefectFields& d) { return d.burgers.frame(); }

/// ε_ijk with 0-based indices.
double levi(int i, int j, int k) { return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0; }

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

DislocationBalance dislocation_balance(const DefectFields& d)
{
    const FramePtr frame = frame_of(d);
    const FormField db = exterior_derivative(d.burgers);
    const FormField drho = rebase(exterior_derivative(d.scalar), frame);
    const FormField& rho = d.scalar;
    std::vector<FormField> forms;
    for (int a = 0; a < 3; ++a) {
        const FormField ea = basis_field(a, frame);
        const FormField dual = hodge(ea);
        forms.push_back(wedge(db, ea) + ((1.0 / 3.0) * rho) * wedge(d.burgers, dual) -
                        (4.0 * rho) * wedge(d.frank, dual) - (2.0 / 3.0) * wedge(drho, dual) +
                        ((2.0 / 9.0) * rho) * wedge(d.point, dual));
    }

    const VectorField curl_b = curl(to_vector(d.burgers), frame);
    const VectorField grad_rho = to_vector(drho);
    VectorField vec;
    for (int a = 0; a < 3; ++a) {
        const auto k = static_cast<std::size_t>(a);
        vec.components[k] = curl_b[k] + ((1.0 / 3.0) * rho) * iota(a, d.burgers) - (4.0 * rho) * iota(a, d.frank) -
                            (2.0 / 3.0) * grad_rho[k] + ((2.0 / 9.0) * rho) * iota(a, d.point);
    }
    return {TensorFormField({Slot::Up}, std::move(forms)), vec};
}

DisclinationPointBalance disclination_point_balance(const DefectFields& d)
{
    const FramePtr frame = frame_of(d);
    DisclinationPointBalance out;
    out.point_curl = curl(to_vector(d.point), frame);
    const VectorField curl_omega = curl(to_vector(d.frank), frame);
    std::array<FormField, 3> b, w;
    for (int a = 0; a < 3; ++a) {
        const auto k = static_cast<std::size_t>(a);
        b[k] = iota(a, d.burgers);
        w[k] = iota(a, d.frank);
        out.beltrami.components[k] = curl_omega[k] - d.scalar * w[k];
    }
    const FormField ww = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    const FormField bw = b[0] * w[0] + b[1] * w[1] + b[2] * w[2];
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t c = 0; c < 3; ++c) {
            FormField term = -54.0 * (w[a] * w[c]) + 7.5 * (b[a] * w[c] + b[c] * w[a]);
            if (a == c) term = term + 18.0 * ww - 5.0 * bw;
            out.algebraic[3 * a + c] = term;
        }
    }
    return out;
}

std::array<FormField, 27> kinematic_tensor(const DefectFields& d)
{
    const FramePtr frame = frame_of(d);
    const VectorField curl_omega = curl(to_vector(d.frank), frame);
    const VectorField curl_m = curl(to_vector(d.point), frame);
    std::array<FormField, 3> b, w;
    for (int a = 0; a < 3; ++a) {
        b[static_cast<std::size_t>(a)] = iota(a, d.burgers);
        w[static_cast<std::size_t>(a)] = iota(a, d.frank);
    }
    const FormField& rho = d.scalar;
    // ε-weighted contractions: (b×·)_{bc} = Σ_k b_k ε_kbc and likewise for Ω.
    const auto contract = [](const std::array<FormField, 3>& v, int j, int l) {
        FormField s = FormField::zero(0);
        for (int k = 0; k < 3; ++k) {
            const double eps = levi(k, j, l);
            if (eps != 0.0) s = s + eps * v[static_cast<std::size_t>(k)];
        }
        return s;
    };

    std::array<FormField, 27> out;
    for (int a = 0; a < 3; ++a) {
        for (int bb = 0; bb < 3; ++bb) {
            for (int c = 0; c < 3; ++c) {
                const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(bb),
                           uc = static_cast<std::size_t>(c);
                FormField s = FormField::zero(0);
                if (a == c) s = s - 0.45 * curl_omega[ub] + 0.45 * (rho * w[ub]);
                if (bb == c) s = s - 0.45 * curl_omega[ua] + 0.45 * (rho * w[ua]);
                if (a == bb) s = s + 0.3 * curl_omega[uc] + (1.0 / 3.0) * curl_m[uc] - 0.3 * (rho * w[uc]);
                s = s - 0.225 * (w[ua] * contract(b, bb, c)) - 0.225 * (w[ub] * contract(b, a, c)) -
                    0.225 * (b[ua] * contract(w, bb, c)) - 0.225 * (b[ub] * contract(w, a, c)) +
                    1.62 * (w[ua] * contract(w, bb, c)) + 1.62 * (w[ub] * contract(w, a, c));
                out[9 * ua + 3 * ub + uc] = s;
            }
        }
    }
    return out;
}

KinematicProjections project(const std::array<double, 27>& s)
{
    KinematicProjections p;
    const auto at = [&](int a, int b, int c) { return s[static_cast<std::size_t>(9 * a + 3 * b + c)]; };
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            p.trace_ab[static_cast<std::size_t>(i)] += at(k, k, i);
            p.trace_ac[static_cast<std::size_t>(i)] += at(k, i, k);
        }
    }
    double m[3][3] = {};
    for (int a = 0; a < 3; ++a)
        for (int dd = 0; dd < 3; ++dd)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) m[a][dd] += levi(dd, b, c) * at(a, b, c);
    const double trace = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    for (int a = 0; a < 3; ++a)
        for (int dd = 0; dd < 3; ++dd)
            p.dual[static_cast<std::size_t>(3 * a + dd)] = 0.5 * (m[a][dd] + m[dd][a]) - (a == dd ? trace : 0.0);
    return p;
}

ProportionalityFit fit_proportional(const TensorFormField& a, const TensorFormField& b, std::span<const Point> points)
{
    std::vector<FormField> fields = a.components();
    fields.insert(fields.end(), b.components().begin(), b.components().end());
    const std::size_t n = a.size();
    const FieldBatch batch(std::move(fields));

    std::vector<std::vector<double>> av, bv;
    double ab = 0.0, bb = 0.0;
    for (const Point& p : points) {
        const std::vector<KForm> values = batch.evaluate(p);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < values[i].size(); ++j) {
                x.push_back(values[i][j]);
                y.push_back(values[n + i][j]);
            }
        }
        ab += dot(x, y);
        bb += dot(y, y);
        av.push_back(std::move(x));
        bv.push_back(std::move(y));
    }

    ProportionalityFit fit;
    fit.samples = points.size();
    fit.constant = bb > 0.0 ? ab / bb : 0.0;
    double worst = 0.0;
    for (std::size_t p = 0; p < av.size(); ++p) {
        for (std::size_t i = 0; i < av[p].size(); ++i) {
            worst = std::max(worst, std::abs(av[p][i] - fit.constant * bv[p][i]));
            fit.scale = std::max(fit.scale, std::abs(bv[p][i]));
        }
    }
    fit.residual = fit.scale > 0.0 ? worst / fit.scale : worst;

    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < av.size(); ++p) {
        const double norm = dot(bv[p], bv[p]);
        if (norm <= 1e-12 * fit.scale * fit.scale || norm == 0.0) continue;
        const double ratio = dot(av[p], bv[p]) / norm;
        sum += ratio;
        sum_sq += ratio * ratio;
        ++count;
    }
    if (count > 0 && fit.constant != 0.0) {
        const double mean = sum / static_cast<double>(count);
        fit.spread = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean)) /
                     std::abs(fit.constant);
    }
    return fit;
}

namespace {

TensorFormField substitution(const DefectFields& d, const Connection* omega)
{
    const FramePtr frame = frame_of(d);
    const TensorFormField t = reconstruct_torsion(d.burgers, d.scalar, frame);
    const TensorFormField q = reconstruct_nonmetricity(d.frank, d.point, frame);
    const FormField d_frank = exterior_derivative(d.frank);
    const FormField d_point = exterior_derivative(d.point);

    std::array<FormField, 3> w, dw, de;
    for (int a = 0; a < 3; ++a) w[static_cast<std::size_t>(a)] = iota(a, d.frank);
    for (int a = 0; a < 3; ++a) {
        const auto k = static_cast<std::size_t>(a);
        FormField acc;
        if (omega) {
            acc = rebase(exterior_derivative(w[k]), frame);
            for (int c = 0; c < 3; ++c) acc = acc - w[static_cast<std::size_t>(c)] * (*omega)(c, a);
        } else {
            acc = -0.5 * iota(a, d_frank);
            for (int b = 0; b < 3; ++b) acc = acc + (0.5 * w[static_cast<std::size_t>(b)]) * iota(a, t(b));
        }
        dw[k] = acc;
        FormField e = t(a);
        for (int c = 0; c < 3; ++c) e = e - 2.0 * wedge(q(a, c), basis_field(c, frame));
        de[k] = e;
    }

    std::vector<FormField> out;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
            FormField s = 0.9 * (wedge(dw[ua], basis_field(b, frame)) + w[ua] * de[ub] +
                                 wedge(dw[ub], basis_field(a, frame)) + w[ub] * de[ua]);
            s = s + 1.2 * wedge(q(a, b), d.frank) - (2.0 / 3.0) * wedge(q(a, b), d.point);
            if (a == b) s = s - 0.6 * d_frank + (1.0 / 3.0) * d_point;
            out.push_back(s);
        }
    }
    return TensorFormField({Slot::Down, Slot::Down}, std::move(out));
}

}  // namespace

TensorFormField disclination_substitution(const DefectFields& d) { return substitution(d, nullptr); }

TensorFormField disclination_substitution(const DefectFields& d, const Connection& omega)
{
    return substitution(d, &omega);
}

BianchiConsistency bianchi_consistency(const CoFrame& e, const DefectFields& d, std::span<const Point> points)
{
    const Connection omega = defect_connection(e, d);
    const TensorFormField r = curvature(omega);
    std::vector<FormField> r_sym;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) r_sym.push_back(0.5 * (r(a, b) + r(b, a)));
    BianchiConsistency out;
    out.dislocation = fit_proportional(dislocation_balance(d).form, curvature_wedge_coframe(r, e.frame()), points);
    const TensorFormField r_sym_tensor({Slot::Down, Slot::Down}, std::move(r_sym));
    out.disclination = fit_proportional(disclination_substitution(d), r_sym_tensor, points);
    out.disclination_covariant = fit_proportional(disclination_substitution(d, omega), r_sym_tensor, points);
    return out;
}

ExtraMatter extra_matter(const FormField& potential, const Sphere& region, const QuadratureOptions& options)
{
    if (potential.degree() != 0) throw DegreeMismatch("the extra-matter potential is a 0-form");
    if (!(region.radius > 0.0)) throw InvalidArgument("sphere radius must be positive");
    if (options.volume_resolution < 1 || options.sphere_resolution < 1) {
        throw InvalidArgument("quadrature resolutions must be positive");
    }
    const FramePtr frame = potential.frame();
    const FormField flux_form = hodge(exterior_derivative(potential));
    ExtraMatter out;
    out.density = hodge(exterior_derivative(flux_form));

    const int n = options.volume_resolution;
    const double h = 2.0 * region.radius / n;
    const auto& c = region.center;
    std::vector<double> slabs(static_cast<std::size_t>(n), 0.0);
    detail::parallel_for(n, options.threads, [&](int i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double x = -region.radius + (i + 0.5) * h, y = -region.radius + (j + 0.5) * h,
                             z = -region.radius + (k + 0.5) * h;
                if (x * x + y * y + z * z > region.radius * region.radius) continue;
                const Point p{c[0] + x, c[1] + y, c[2] + z, 0.0};
                const double volume = frame ? frame->at(p).determinant : 1.0;
                s += out.density.evaluate(p)[0] * volume;
            }
        }
        slabs[static_cast<std::size_t>(i)] = s * h * h * h;
    });
    out.volume_total = detail::ordered_sum(slabs);

    const int nt = options.sphere_resolution, np = 2 * options.sphere_resolution;
    const double dt = std::numbers::pi / nt, dp = 2.0 * std::numbers::pi / np;
    const double r = region.radius;
    std::vector<double> rings(static_cast<std::size_t>(nt), 0.0);
    detail::parallel_for(nt, options.threads, [&](int i) {
        const double theta = (i + 0.5) * dt;
        double s = 0.0;
        for (int j = 0; j < np; ++j) {
            const double phi = (j + 0.5) * dp;
            const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
            const Point p{c[0] + r * st * cp, c[1] + r * st * sp, c[2] + r * ct, 0.0};
            const double u[3] = {r * ct * cp, r * ct * sp, -r * st};
            const double v[3] = {-r * st * sp, r * st * cp, 0.0};
            const KForm alpha = to_coordinates(frame, flux_form.evaluate(p), p);
            // Components ordered 12, 13, 23.
            s += alpha[0] * (u[0] * v[1] - u[1] * v[0]) + alpha[1] * (u[0] * v[2] - u[2] * v[0]) +
                 alpha[2] * (u[1] * v[2] - u[2] * v[1]);
        }
        rings[static_cast<std::size_t>(i)] = s * dt * dp;
    });
    out.flux_total = detail::ordered_sum(rings);
    return out;
}

}  // namespace defectgeo

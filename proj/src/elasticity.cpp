#include "defectgeo/elasticity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "defectgeo/errors.hpp"

namespace defectgeo {

namespace {

constexpr Var kSpace[3] = {Var::X, Var::Y, Var::Z};

FormField one() { return FormField::constant(KForm(0, {1.0})); }

double value(const FormField& f, const Point& p) { return f(p)[0]; }

Mat3 evaluate(const FieldMat3& m, const Point& p)
{
    Mat3 out{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) out[i][j] = value(m[i][j], p);
    return out;
}

std::string where(const Point& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.x << ", " << p.y << ", " << p.z << ", t = " << p.t << ")";
    return os.str();
}

/// Adjugate over determinant.
ExprMat3 symbolic_inverse(const ExprMat3& m)
{
    ExprMat3 adj;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const auto r0 = static_cast<std::size_t>((j + 1) % 3), r1 = static_cast<std::size_t>((j + 2) % 3);
            const auto c0 = static_cast<std::size_t>((i + 1) % 3), c1 = static_cast<std::size_t>((i + 2) % 3);
            adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        }
    }
    const Expr det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    ExprMat3 inv;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) inv[i][j] = adj[i][j] / det;
    return inv;
}

FormField scalar_field(const Expr& e, Strategy strategy, double step)
{
    FormField f = FormField::scalar(e);
    return strategy == Strategy::FiniteDifference ? f.as_finite_difference(step) : f;
}

std::shared_ptr<const Tape> make_tape(std::span<const Expr> roots) { return std::make_shared<Tape>(roots); }

double inf_norm(const Eigen::Vector3d& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

DeformationMap DeformationMap::from_inverse(const ExprVec3& body_coordinates, Strategy strategy, double step)
{
    if (strategy == Strategy::ExactUserSupplied)
        throw InvalidArgument("deformation maps are symbolic; use Symbolic or FiniteDifference gradients");
    DeformationMap m;
    m.map_ = body_coordinates;
    m.strategy_ = strategy;
    m.step_ = step;
    m.values_ = make_tape(m.map_);
    std::vector<Expr> jac;
    for (const Expr& component : m.map_)
        for (Var v : kSpace) jac.push_back(differentiate(component, v));
    m.jacobian_ = make_tape(jac);
    return m;
}

DeformationMap DeformationMap::from_forward(const ExprVec3& spatial_coordinates, Strategy strategy, double step)
{
    DeformationMap m = from_inverse(spatial_coordinates, strategy, step);
    m.forward_ = true;
    return m;
}

Mat3 DeformationMap::forward_jacobian(const std::array<double, 3>& body, double t) const
{
    const std::vector<double> j = jacobian_->evaluate({body[0], body[1], body[2], t});
    Mat3 out{};
    for (std::size_t i = 0; i < 9; ++i) out[i / 3][i % 3] = j[i];
    return out;
}

std::array<double, 3> DeformationMap::body_point(const Point& p) const
{
    if (!forward_) {
        const std::vector<double> v = values_->evaluate(p);
        return {v[0], v[1], v[2]};
    }
    const Eigen::Vector3d target(p.x, p.y, p.z);
    const double tolerance = kNewtonTolerance * std::max(1.0, inf_norm(target));
    auto residual = [&](const Eigen::Vector3d& body) -> Eigen::Vector3d {
        const std::vector<double> v = values_->evaluate({body[0], body[1], body[2], p.t});
        return Eigen::Vector3d(v[0], v[1], v[2]) - target;
    };

    Eigen::Vector3d body = target;
    Eigen::Vector3d r = residual(body);
    for (int iteration = 0; iteration < kNewtonIterations; ++iteration) {
        if (inf_norm(r) <= tolerance) return {body[0], body[1], body[2]};
        const Mat3 j = forward_jacobian({body[0], body[1], body[2]}, p.t);
        Eigen::Matrix3d jm;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) jm(a, b) = j[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (std::abs(jm.determinant()) < kSingularThreshold)
            throw SingularDeformation("forward map Jacobian is singular near " + where(p));
        const Eigen::Vector3d step = jm.partialPivLu().solve(r);
        double damping = 1.0;
        Eigen::Vector3d trial = body - step;
        Eigen::Vector3d trial_r = residual(trial);
        while (!(inf_norm(trial_r) < inf_norm(r)) && damping > 1.0 / 1024.0) {
            damping /= 2.0;
            trial = body - damping * step;
            trial_r = residual(trial);
        }
        body = trial;
        r = trial_r;
    }
    if (inf_norm(r) <= tolerance) return {body[0], body[1], body[2]};
    std::ostringstream os;
    os << "forward map inversion did not converge in " << kNewtonIterations << " iterations at " << where(p)
       << " (residual " << inf_norm(r) << ")";
    throw NewtonFailure(os.str());
}

DeformationGradients deformation_gradients(const DeformationMap& map, std::span<const Point> grid)
{
    DeformationGradients out;
    if (!map.is_forward()) {
        ExprMat3 push;
        for (std::size_t A = 0; A < 3; ++A)
            for (std::size_t a = 0; a < 3; ++a) push[A][a] = differentiate(map.expressions()[A], kSpace[a]);
        const ExprMat3 pull = symbolic_inverse(push);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                out.pushforward[i][j] = scalar_field(push[i][j], map.strategy(), map.step());
                out.pullback[i][j] = scalar_field(pull[i][j], map.strategy(), map.step());
            }
        }
    } else {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                out.pullback[i][j] = FormField::finite_difference(
                    0,
                    [map, i, j](const Point& p) {
                        return KForm(0, {map.forward_jacobian(map.body_point(p), p.t)[i][j]});
                    },
                    nullptr, map.step());
                out.pushforward[i][j] = FormField::finite_difference(
                    0,
                    [map, i, j](const Point& p) {
                        double det = 0.0;
                        bool ok = true;
                        const Mat3 inv = inverse3(map.forward_jacobian(map.body_point(p), p.t), det, ok);
                        if (!ok) throw SingularDeformation("forward map Jacobian is singular at " + where(p));
                        return KForm(0, {inv[i][j]});
                    },
                    nullptr, map.step());
            }
        }
    }

    for (const Point& p : grid) {
        double det = 0.0;
        if (map.is_forward()) {
            const double forward_det = det3(map.forward_jacobian(map.body_point(p), p.t));
            det = forward_det == 0.0 ? 0.0 : 1.0 / forward_det;
        } else {
            det = det3(evaluate(out.pushforward, p));
        }
        if (!(std::abs(det) >= kSingularThreshold))
            throw SingularDeformation("deformation gradient determinant " + std::to_string(det) + " at " + where(p));
    }
    return out;
}

Mat3 orthonormal_pullback(const DeformationMap& map, const CoFrame& spatial, const ExprMat3& body_triad,
                          const Point& p)
{
    const std::array<double, 3> body = map.body_point(p);
    Mat3 coordinate{};
    if (map.is_forward()) {
        coordinate = map.forward_jacobian(body, p.t);
    } else {
        double det = 0.0;
        bool ok = true;
        coordinate = inverse3(map.forward_jacobian({p.x, p.y, p.z}, p.t), det, ok);
        if (!ok) throw SingularDeformation("deformation gradient is singular at " + where(p));
    }
    const Mat3 h = spatial.frame() ? spatial.frame()->at(p).triad : identity3();

    std::vector<Expr> entries;
    for (const auto& row : body_triad) entries.insert(entries.end(), row.begin(), row.end());
    const std::vector<double> hb = Tape(entries).evaluate({body[0], body[1], body[2], p.t});
    Mat3 body_h{};
    for (std::size_t i = 0; i < 9; ++i) body_h[i / 3][i % 3] = hb[i];
    double det = 0.0;
    bool ok = true;
    const Mat3 body_inverse = inverse3(body_h, det, ok);
    if (!ok) throw SingularTriad("body triad is singular at " + where(p));
    return multiply3(multiply3(h, coordinate), body_inverse);
}

StrainState euler_strain(const DeformationGradients& gradients)
{
    const FieldMat3& f = gradients.pushforward;
    StrainState out;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a; b < 3; ++b) {
            FormField metric = f[0][a] * f[0][b] + f[1][a] * f[1][b] + f[2][a] * f[2][b];
            FormField s = a == b ? 0.5 * (one() - metric) : -0.5 * metric;
            out.strain[a][b] = s;
            out.strain[b][a] = s;
        }
    }
    return out;
}

FieldMat3 deformation_rate(const StrainState& strain, const VectorField& velocity)
{
    const FieldMat3& e = strain.strain;
    std::array<std::array<FormField, 3>, 3> grad_v;  // [a][c] = ∂_a v^c
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t c = 0; c < 3; ++c) grad_v[a][c] = coordinate_partial(velocity[c], static_cast<int>(a));

    FieldMat3 out;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a; b < 3; ++b) {
            FormField r = time_derivative(e[a][b]);
            for (std::size_t i = 0; i < 3; ++i)
                r = r + velocity[i] * coordinate_partial(e[a][b], static_cast<int>(i));
            for (std::size_t c = 0; c < 3; ++c) r = r + e[c][b] * grad_v[a][c] + e[a][c] * grad_v[b][c];
            out[a][b] = r;
            out[b][a] = r;
        }
    }
    return out;
}

StressState make_stress(const FieldMat3& sigma, const CoFrame& e)
{
    StressState out;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a; b < 3; ++b) {
            out.sigma[a][b] = sigma[a][b];
            out.sigma[b][a] = sigma[a][b];
        }
    }
    for (std::size_t a = 0; a < 3; ++a) {
        FormField tau = FormField::zero(2, e.frame());
        for (std::size_t b = 0; b < 3; ++b)
            tau = tau + out.sigma[a][b] * hodge(basis_field(static_cast<int>(b), e.frame()));
        out.tau[a] = tau;
    }
    return out;
}

StressState isotropic_stress(const StrainState& strain, const MaterialConstants& mat, const CoFrame& e)
{
    if (mat.kappa != 0.0)
        throw AnisotropyNotSupported("the isotropic Hooke law needs kappa = 0, got " + std::to_string(mat.kappa));
    if (!(mat.mu > 0.0)) throw InvalidMaterial("shear modulus mu must be positive");
    const FieldMat3& s = strain.strain;
    const FormField trace = s[0][0] + s[1][1] + s[2][2];
    FieldMat3 sigma;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a; b < 3; ++b) {
            sigma[a][b] = (2.0 * mat.mu) * s[a][b];
            if (a == b) sigma[a][b] = sigma[a][b] + mat.lambda * trace;
        }
    }
    return make_stress(sigma, e);
}

std::array<double, 81> stiffness_tensor(const MaterialConstants& mat)
{
    std::array<double, 81> c{};
    auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int cc = 0; cc < 3; ++cc)
                for (int d = 0; d < 3; ++d)
                    c[static_cast<std::size_t>(27 * a + 9 * b + 3 * cc + d)] =
                        mat.lambda * delta(a, b) * delta(cc, d) +
                        mat.mu * (delta(a, cc) * delta(b, d) + delta(a, d) * delta(b, cc)) +
                        mat.kappa * (delta(a, cc) * delta(b, d) - delta(a, d) * delta(b, cc));
    return c;
}

FieldMat3 contract_stiffness(const std::array<double, 81>& stiffness, const StrainState& strain)
{
    FieldMat3 out;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            FormField sum;
            for (std::size_t c = 0; c < 3; ++c) {
                for (std::size_t d = 0; d < 3; ++d) {
                    const double k = stiffness[27 * a + 9 * b + 3 * c + d];
                    if (k != 0.0) sum = sum + k * strain.strain[c][d];
                }
            }
            out[a][b] = sum;
        }
    }
    return out;
}

FormField mass_conservation_residual(const FormField& density, const VectorField& velocity, const FramePtr& frame)
{
    VectorField flux;
    for (std::size_t a = 0; a < 3; ++a) flux.components[a] = density * velocity[a];
    return time_derivative(density) + div(flux, frame);
}

std::array<FormField, 3> cauchy_motion_residual(const FormField& density, const VectorField& velocity,
                                                const VectorField& force, const StressState& stress,
                                                const CoFrame& e)
{
    const FramePtr& frame = e.frame();
    const Connection gamma = levi_civita(e);
    const FormField volume = FormField::constant(KForm(3, {1.0}), frame);
    const TensorFormField dtau =
        covariant_exterior_derivative(TensorFormField({Slot::Up}, {stress.tau[0], stress.tau[1], stress.tau[2]}), gamma);

    std::array<FormField, 3> out;
    for (int a = 0; a < 3; ++a) {
        const auto k = static_cast<std::size_t>(a);
        FormField dv = rebase(exterior_derivative(velocity[k]), frame);
        for (int b = 0; b < 3; ++b) dv = dv + velocity[static_cast<std::size_t>(b)] * gamma(a, b);
        FormField transport;
        for (int b = 0; b < 3; ++b)
            transport = transport + velocity[static_cast<std::size_t>(b)] * interior(FrameIndex(b + 1), dv);
        const FormField acceleration = time_derivative(velocity[k]) + transport;
        out[k] = (density * (acceleration - force[k])) * volume - dtau(a);
    }
    return out;
}

FormField volume_relation_residual(const DeformationGradients& gradients, const CoFrame& e)
{
    const FramePtr frame = e.frame();
    return FormField::finite_difference(
        0,
        [gradients, frame](const Point& p) {
            const Mat3 h = frame ? frame->at(p).triad : identity3();
            const Mat3 pull = evaluate(gradients.pullback, p);
            const Mat3 push = evaluate(gradients.pushforward, p);
            return KForm(0, {det3(multiply3(h, pull)) - det3(h) / det3(push)});
        },
        nullptr, gradients.pullback[0][0].step());
}

}  // namespace defectgeo

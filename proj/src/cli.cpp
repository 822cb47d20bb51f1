#include "defectgeo/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "defectgeo/elasticity.hpp"
#include "defectgeo/errors.hpp"
#include "defectgeo/free_energy.hpp"
#include "defectgeo/kinematics.hpp"
#include "defectgeo/scenario.hpp"

namespace defectgeo::cli {

namespace {

using nlohmann::json;

/// Bianchi-substitution fits are evaluated on at most this many grid points.
constexpr std::size_t kFitPoints = 125;
constexpr double kFitResidualTolerance = 1e-4;
constexpr double kFitSpreadTolerance = 1e-3;
constexpr double kStokesTolerance = 0.01;
constexpr double kAlgebraicTolerance = 1e-12;
constexpr double kVolumeTolerance = 1e-8;
constexpr double kInverseTolerance = 1e-10;

const char* const kCommands[] = {"check", "defects", "kinematics", "elastic", "energy", "calibrate"};

struct Context {
    Scenario scenario;
    CoFrame coframe;
    std::vector<Point> points;
    double tolerance = 0.0;
    unsigned threads = 1;
};

std::vector<Point> grid_points(const NumericsSpec& n, int resolution)
{
    std::vector<Point> out;
    auto coordinate = [&](std::size_t axis, int i) {
        return n.grid_min[axis] + (n.grid_max[axis] - n.grid_min[axis]) * i / (resolution - 1);
    };
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k) out.push_back({coordinate(0, i), coordinate(1, j), coordinate(2, k), 0.0});
    return out;
}

std::vector<Point> subsample(const std::vector<Point>& points, std::size_t limit)
{
    if (points.size() <= limit) return points;
    std::vector<Point> out;
    const double stride = static_cast<double>(points.size()) / static_cast<double>(limit);
    for (std::size_t i = 0; i < limit; ++i) out.push_back(points[static_cast<std::size_t>(i * stride)]);
    return out;
}

double scalar_at(const FormField& f, const Point& p) { return f(p)[0]; }

double max_abs(const FormField& f, std::span<const Point> points)
{
    double m = 0.0;
    for (const Point& p : points)
        for (double v : f(p).components()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const VectorField& v, std::span<const Point> points)
{
    double m = 0.0;
    for (const FormField& c : v.components) m = std::max(m, max_abs(c, points));
    return m;
}

FormField one_form(const Context& c, const ExprVec3& v) { return c.coframe.one_form(v); }

DefectFields scenario_defects(const Context& c)
{
    const DefectSpec& d = c.scenario.defects;
    return make_defect_fields(one_form(c, d.burgers), one_form(c, d.frank), one_form(c, d.point),
                              c.coframe.scalar(d.scalar), d.c1, d.c2);
}

void require(const Context& c, const char* section, const char* command)
{
    if (!c.scenario.has(section))
        throw ScenarioError(std::string("the ") + command + " command needs a [" + section + "] section", 0);
}

const char* strategy_name(Strategy s)
{
    switch (s) {
    case Strategy::Symbolic: return "symbolic";
    case Strategy::FiniteDifference: return "finite_difference";
    default: return "exact";
    }
}

json fit_json(const ProportionalityFit& f)
{
    return {{"constant", f.constant}, {"residual", f.residual}, {"spread", f.spread}, {"scale", f.scale},
            {"samples", f.samples}};
}

void add(Report& r, std::string name, double residual, double tolerance, const char* kind = "identity")
{
    r.checks.push_back({std::move(name), kind, residual, tolerance});
}

void add_fits(Report& r, const Context& c, const DefectFields& d)
{
    const auto fit_points = subsample(c.points, kFitPoints);
    const BianchiConsistency b = bianchi_consistency(c.coframe, d, fit_points);
    add(r, "bianchi_substitution_residual", b.dislocation.residual, kFitResidualTolerance);
    add(r, "bianchi_substitution_spread", b.dislocation.spread, kFitSpreadTolerance);
    r.calibration["dislocation_curvature_ratio"] = fit_json(b.dislocation);
    r.calibration["disclination_curvature_ratio"] = fit_json(b.disclination);
    r.calibration["covariant_disclination_curvature_ratio"] = fit_json(b.disclination_covariant);
}

// --- commands ---------------------------------------------------------------

void cmd_check(Report& r, const Context& c)
{
    const CoFrame& e = c.coframe;
    const auto& pts = c.points;
    const double tol = c.tolerance;

    const Connection gamma = levi_civita(e);
    add(r, "levi_civita_torsion", normalized_residual(torsion(e, gamma), {gamma}, pts), tol);
    add(r, "levi_civita_metricity", normalized_residual(nonmetricity(gamma), {gamma}, pts), tol);

    const DefectFields d = scenario_defects(c);
    const Connection omega = defect_connection(e, d);
    const TensorFormField curv = curvature(omega);
    const TensorFormField tors = torsion(e, omega);
    const BianchiResiduals b = bianchi_residuals(e, omega);
    add(r, "bianchi_curvature", normalized_residual(b.curvature, {omega, curv}, pts), tol);
    add(r, "bianchi_torsion", normalized_residual(b.torsion, {omega, curv, tors}, pts), tol);
    add(r, "bianchi_nonmetricity", normalized_residual(b.nonmetricity, {omega, curv}, pts), tol);

    const TensorFormField t_in = rebase(reconstruct_torsion(d.burgers, d.scalar, e.frame()), e.frame());
    const TensorFormField q_in = rebase(reconstruct_nonmetricity(d.frank, d.point, e.frame()), e.frame());
    add(r, "round_trip_torsion", normalized_residual(tors - t_in, {t_in}, pts), tol);
    const TensorFormField q_out = nonmetricity(omega);
    add(r, "round_trip_nonmetricity", normalized_residual(q_out - q_in, {q_in}, pts), tol);
    add(r, "curvature_decomposition", normalized_residual(curvature_decomposition_residual(e, t_in, q_in), {curv}, pts),
        tol);

    if (c.scenario.gauge) {
        const GaugeField gauge(*c.scenario.gauge);
        gauge.validate(pts);
        const Connection flat = pure_gauge(gauge, e);
        add(r, "gauge_flatness", normalized_residual(curvature(flat), {flat}, pts), tol);
    }
}

void cmd_defects(Report& r, const Context& c, std::ostream* csv)
{
    const bool from_gauge = c.scenario.gauge.has_value();
    if (!from_gauge && !c.scenario.has("defects"))
        throw ScenarioError("the defects command needs a [defects] or [gauge] section", 0);
    const CoFrame& e = c.coframe;
    const auto& pts = c.points;
    const NumericsSpec& n = c.scenario.numerics;
    const DefectSpec& spec = c.scenario.defects;

    Connection omega;
    std::optional<DefectFields> input;
    if (from_gauge) {
        const GaugeField gauge(*c.scenario.gauge);
        gauge.validate(pts);
        omega = pure_gauge(gauge, e);
    } else {
        input = scenario_defects(c);
        omega = defect_connection(e, *input);
    }
    const DefectFields d = extract_defects(e, omega, n.frank_mode, spec.c1, spec.c2);
    r.values["source"] = from_gauge ? "gauge" : "defects";

    const FormField combination = d.burgers + d.c1 * d.frank + d.c2 * d.point;
    add(r, "generalized_burgers", max_abs(d.generalized_burgers - combination, pts), kAlgebraicTolerance);
    if (input) {
        const double frank_factor = n.frank_mode == FrankMode::Raw ? kFrankScale : 1.0;
        double diff = 0.0, scale = 0.0;
        const std::pair<FormField, FormField> pairs[] = {{d.burgers, input->burgers},
                                                          {d.frank, frank_factor * input->frank},
                                                          {d.point, input->point},
                                                          {d.scalar, input->scalar}};
        for (const auto& [out, in] : pairs) {
            diff = std::max(diff, max_abs(out - in, pts));
            scale = std::max(scale, max_abs(in, pts));
        }
        add(r, "extraction_round_trip", diff / (1.0 + scale), c.tolerance);
    }

    r.values["max_abs"] = {{"b", max_abs(d.burgers, pts)},
                           {"Omega", max_abs(d.frank, pts)},
                           {"m", max_abs(d.point, pts)},
                           {"rho", max_abs(d.scalar, pts)},
                           {"B", max_abs(d.generalized_burgers, pts)}};

    if (csv) {
        std::ostream& os = *csv;
        os << kCsvHeader << '\n' << std::setprecision(17);
        const FormField* columns[] = {&d.burgers, &d.frank, &d.point, &d.scalar, &d.generalized_burgers};
        for (const Point& p : pts) {
            os << p.x << ',' << p.y << ',' << p.z;
            for (const FormField* f : columns)
                for (double x : (*f)(p).components()) os << ',' << x;
            os << '\n';
        }
    }
}

void cmd_kinematics(Report& r, const Context& c)
{
    require(c, "defects", "kinematics");
    const auto& pts = c.points;
    const DefectFields d = scenario_defects(c);

    const DislocationBalance dislocation = dislocation_balance(d);
    double agreement = 0.0, scale = 0.0;
    for (int a = 0; a < 3; ++a) {
        const FormField& vec = dislocation.vector.components[static_cast<std::size_t>(a)];
        agreement = std::max(agreement, max_abs(hodge(dislocation.form(a)) - vec, pts));
        scale = std::max(scale, max_abs(vec, pts));
    }
    add(r, "dislocation_form_vector", agreement / (1.0 + scale), c.tolerance);
    add_fits(r, c, d);

    const DisclinationPointBalance point = disclination_point_balance(d);
    add(r, "dislocation_balance", max_abs(dislocation.vector, pts), c.tolerance, "balance");
    add(r, "point_defect_curl", max_abs(point.point_curl, pts), c.tolerance, "balance");
    add(r, "beltrami", max_abs(point.beltrami, pts), c.tolerance, "balance");
    double algebraic = 0.0;
    for (const FormField& f : point.algebraic) algebraic = std::max(algebraic, max_abs(f, pts));
    add(r, "algebraic_balance", algebraic, c.tolerance, "balance");

    if (c.scenario.defects.potential) {
        const NumericsSpec& n = c.scenario.numerics;
        QuadratureOptions q;
        q.volume_resolution = n.volume_resolution;
        q.sphere_resolution = n.sphere_resolution;
        q.threads = c.threads;
        const ExtraMatter m = extra_matter(c.coframe.scalar(*c.scenario.defects.potential),
                                           Sphere{n.sphere_center, n.sphere_radius}, q);
        const double denominator = std::max(std::abs(m.flux_total), 1e-300);
        add(r, "extra_matter_stokes", std::abs(m.volume_total - m.flux_total) / denominator, kStokesTolerance);
        r.values["extra_matter"] = {{"volume_total", m.volume_total},
                                    {"flux_total", m.flux_total},
                                    {"volume_resolution", n.volume_resolution},
                                    {"sphere_resolution", n.sphere_resolution}};
    }
}

json matrix_json(const FieldMat3& m, const Point& p)
{
    json out = json::array();
    for (const auto& row : m)
        for (const FormField& f : row) out.push_back(scalar_at(f, p));
    return out;
}

void cmd_elastic(Report& r, const Context& c)
{
    require(c, "deformation", "elastic");
    const DeformationSpec& spec = *c.scenario.deformation;
    const CoFrame& e = c.coframe;
    const auto& pts = c.points;
    const NumericsSpec& n = c.scenario.numerics;
    if (spec.inverse.has_value() == spec.forward.has_value())
        throw ScenarioError("[deformation] needs exactly one of 'inverse' and 'forward'", c.scenario.sections.at("deformation"));

    const DeformationMap map = spec.inverse ? DeformationMap::from_inverse(*spec.inverse, n.strategy, n.step)
                                            : DeformationMap::from_forward(*spec.forward, n.strategy, n.step);
    const DeformationGradients g = deformation_gradients(map, pts);
    const StrainState strain = euler_strain(g);
    const StressState stress = isotropic_stress(strain, c.scenario.material, e);

    double inverse = 0.0;
    for (const Point& p : pts) {
        Mat3 pull{}, push{};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                pull[i][j] = scalar_at(g.pullback[i][j], p);
                push[i][j] = scalar_at(g.pushforward[i][j], p);
            }
        }
        const Mat3 product = multiply3(pull, push);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) inverse = std::max(inverse, std::abs(product[i][j] - (i == j ? 1.0 : 0.0)));
    }
    add(r, "gradient_inverse", inverse, kInverseTolerance);
    add(r, "volume_relation", max_abs(volume_relation_residual(g, e), pts), kVolumeTolerance);

    auto vector = [&](const ExprVec3& v) {
        VectorField out;
        for (std::size_t a = 0; a < 3; ++a) out.components[a] = e.scalar(v[a]);
        return out;
    };
    const FormField density = e.scalar(spec.density);
    const VectorField velocity = vector(spec.velocity);
    add(r, "mass_conservation", max_abs(mass_conservation_residual(density, velocity, e.frame()), pts), c.tolerance,
        "balance");
    double cauchy = 0.0;
    for (const FormField& f : cauchy_motion_residual(density, velocity, vector(spec.body_force), stress, e))
        cauchy = std::max(cauchy, max_abs(f, pts));
    add(r, "cauchy_motion", cauchy, c.tolerance, "balance");

    const FieldMat3 rate = deformation_rate(strain, velocity);
    double rate_max = 0.0;
    for (const auto& row : rate)
        for (const FormField& f : row) rate_max = std::max(rate_max, max_abs(f, pts));
    r.values["max_abs_deformation_rate"] = rate_max;

    json samples = json::array();
    const Point centre{0.5 * (n.grid_min[0] + n.grid_max[0]), 0.5 * (n.grid_min[1] + n.grid_max[1]),
                       0.5 * (n.grid_min[2] + n.grid_max[2]), 0.0};
    for (const Point& p : {centre, pts.front(), pts.back()}) {
        samples.push_back({{"point", {p.x, p.y, p.z}},
                           {"strain", matrix_json(strain.strain, p)},
                           {"stress", matrix_json(stress.sigma, p)}});
    }
    r.values["samples"] = samples;
    const MaterialConstants& m = c.scenario.material;
    r.values["material"] = {{"lambda", m.lambda}, {"mu", m.mu}, {"kappa", m.kappa}};
}

void add_invariants(Report& r, const Context& c, const DefectFields& d)
{
    const TensorFormField t = reconstruct_torsion(d.burgers, d.scalar, c.coframe.frame());
    const TensorFormField q = reconstruct_nonmetricity(d.frank, d.point, c.coframe.frame());
    const auto fit_points = subsample(c.points, kFitPoints);
    for (const InvariantDeviation& v : measure(quadratic_invariants(t, q), fit_points)) {
        const double normalized = v.deviation / (1.0 + v.scale);
        if (v.asserted)
            add(r, "invariant " + v.name, normalized, kAlgebraicTolerance);
        else
            r.calibration["invariant " + v.name + " deviation"] = normalized;
    }
}

void cmd_energy(Report& r, const Context& c)
{
    const auto& pts = c.points;
    const NumericsSpec& n = c.scenario.numerics;
    const DefectFields d = scenario_defects(c);
    const Couplings& k = c.scenario.couplings;

    const FormField form = lagrangian_form(d, k, c.coframe);
    const FormField vec = lagrangian_vector(d, k);
    double diff = 0.0, scale = 0.0;
    for (const Point& p : pts) {
        diff = std::max(diff, std::abs(scalar_at(form, p) - scalar_at(vec, p)));
        scale = std::max(scale, std::abs(scalar_at(vec, p)));
    }
    add(r, "representation_equivalence", diff / (1.0 + scale), kAlgebraicTolerance);
    add_invariants(r, c, d);

    const int resolution = static_cast<int>(std::cbrt(static_cast<double>(pts.size())) + 0.5);
    const Box box{n.grid_min, n.grid_max};
    const EnergyEstimate est = free_energy_estimate(d, k, c.coframe, box, resolution, c.threads);
    r.values["free_energy"] = {{"resolution", resolution},
                               {"coarse", est.coarse},
                               {"fine", est.fine},
                               {"richardson", est.richardson},
                               {"error_estimate", est.error}};

    const MappedCouplings m = map_couplings(k);
    // + 0.0 turns the −0.0 of negated zero couplings into 0.
    r.values["mapped_couplings"] = {{"k1", m.k1 + 0.0}, {"k2", m.k2 + 0.0}, {"k3", m.k3 + 0.0}, {"c1", m.c1 + 0.0},
                                    {"c2", m.c2 + 0.0}, {"c3", m.c3 + 0.0}, {"c4", m.c4 + 0.0}, {"c5", m.c5 + 0.0},
                                    {"l1", m.l1 + 0.0}, {"l2", m.l2 + 0.0}, {"l3", m.l3 + 0.0}};
    try {
        r.values["dislocation_energy"] = {
            {"screw", dislocation_energy_coefficient(DislocationKind::Screw, c.scenario.material)},
            {"edge", dislocation_energy_coefficient(DislocationKind::Edge, c.scenario.material)}};
    } catch (const InvalidMaterial& ex) {
        r.values["dislocation_energy"] = {{"error", ex.what()}};
    }
}

void cmd_calibrate(Report& r, const Context& c)
{
    const auto fit_points = subsample(c.points, kFitPoints);
    const FrankCalibration f = calibrate_frank_scale(fit_points);
    r.calibration["frank_scale_measured"] = {{"mean", f.mean}, {"stddev", f.stddev}, {"samples", f.samples}};
    add(r, "frank_scale_frozen", std::abs(f.mean - kFrankScale) / kFrankScale, 1e-3);
    add(r, "frank_scale_position_independence", f.mean != 0.0 ? f.stddev / std::abs(f.mean) : f.stddev, 1e-3);
    if (c.scenario.has("defects")) {
        const DefectFields d = scenario_defects(c);
        add_fits(r, c, d);
        add_invariants(r, c, d);
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

bool Report::passed() const { return first_failure() == nullptr; }

const CheckRecord* Report::first_failure() const
{
    for (const CheckRecord& c : checks)
        if (c.kind == "identity" && !c.passed()) return &c;
    return nullptr;
}

nlohmann::json Report::to_json() const
{
    json list = json::array();
    for (const CheckRecord& c : checks) {
        list.push_back({{"name", c.name},
                        {"kind", c.kind},
                        {"max_residual", c.max_residual},
                        {"tolerance", c.tolerance},
                        {"pass", c.passed()}});
    }
    json out = {{"schema", kReportSchema},
                {"command", command},
                {"scenario", {{"path", scenario}, {"fingerprint", fingerprint}}},
                {"settings", settings},
                {"calibration", calibration},
                {"checks", list},
                {"values", values},
                {"passed", passed()}};
    out["timing_ms"] = timing_ms ? json(*timing_ms) : json(nullptr);
    return out;
}

std::string fingerprint(std::string_view text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

unsigned thread_budget()
{
    if (const char* env = std::getenv("DEFECTGEO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min(v, 1024L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Report execute(const Options& options, std::ostream* csv)
{
    const auto start = std::chrono::steady_clock::now();
    const std::string text = read_file(options.scenario);

    Context c;
    c.scenario = parse_scenario(text);
    NumericsSpec& n = c.scenario.numerics;
    if (options.fd_step) n.step = *options.fd_step;
    if (options.tolerance) n.tolerance = *options.tolerance;
    if (options.grid) n.resolution = *options.grid;
    if (!(n.step > 0.0)) throw InvalidArgument("--fd-step must be positive");
    if (!(n.tolerance > 0.0)) throw InvalidArgument("--tolerance must be positive");
    if (n.resolution < 2) throw InvalidArgument("--grid must be at least 2");
    c.tolerance = n.tolerance;
    c.threads = std::max(1u, options.threads);
    c.points = grid_points(n, n.resolution);
    c.coframe = CoFrame(c.scenario.coframe, n.strategy, n.step);
    c.coframe.validate(c.points);

    Report r;
    r.command = options.command;
    r.scenario = options.scenario;
    r.fingerprint = fingerprint(text);
    r.settings = {{"grid", n.resolution},
                  {"points", c.points.size()},
                  {"grid_min", n.grid_min},
                  {"grid_max", n.grid_max},
                  {"tolerance", n.tolerance},
                  {"fd_step", n.step},
                  {"strategy", strategy_name(n.strategy)},
                  {"frank_mode", n.frank_mode == FrankMode::Literal ? "literal" : "raw"},
                  {"deterministic", options.deterministic}};
    if (!options.deterministic) r.settings["threads"] = c.threads;
    r.calibration["frank_scale"] = kFrankScale;

    if (options.csv && options.command != "defects") throw InvalidArgument("--csv is only produced by the defects command");
    if (options.command == "check") {
        cmd_check(r, c);
    } else if (options.command == "defects") {
        cmd_defects(r, c, csv);
    } else if (options.command == "kinematics") {
        cmd_kinematics(r, c);
    } else if (options.command == "elastic") {
        cmd_elastic(r, c);
    } else if (options.command == "energy") {
        cmd_energy(r, c);
    } else if (options.command == "calibrate") {
        cmd_calibrate(r, c);
    } else {
        throw InvalidArgument("unknown command '" + options.command + "'");
    }

    if (!options.deterministic) {
        r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Defect geometry toolkit: identity checks, defect extraction, kinematics, elasticity and free energy",
                 "defectgeo"};
    Options o;
    app.add_option("command", o.command, "check | defects | kinematics | elastic | energy | calibrate")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCommands), std::end(kCommands))));
    app.add_option("scenario", o.scenario, "scenario file")->required();
    app.add_option("--grid", o.grid, "grid points per axis (overrides numerics.resolution)");
    app.add_option("--csv", o.csv, "write the defect grid as CSV (defects command)");
    app.add_option("--json", o.json, "write the report here instead of stdout");
    app.add_flag("--deterministic", o.deterministic, "omit timing and thread count so reports are byte-identical");
    app.add_option("--tolerance", o.tolerance, "identity-check tolerance (overrides numerics.tolerance)");
    app.add_option("--fd-step", o.fd_step, "finite-difference step (overrides numerics.h)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "defectgeo: " << e.what() << '\n';
        return 2;
    }
    o.threads = thread_budget();

    try {
        std::ostringstream csv_text;
        const Report report = execute(o, o.csv ? &csv_text : nullptr);
        const std::string text = report.to_json().dump(2) + "\n";
        if (o.json) {
            std::ofstream file(*o.json, std::ios::binary);
            if (!file) throw InvalidArgument("cannot write report to '" + *o.json + "'");
            file << text;
        } else {
            out << text;
        }
        if (o.csv) {
            std::ofstream file(*o.csv, std::ios::binary);
            if (!file) throw InvalidArgument("cannot write CSV to '" + *o.csv + "'");
            file << csv_text.str();
        }
        if (const CheckRecord* failure = report.first_failure()) {
            err << "defectgeo: check '" << failure->name << "' failed: max residual " << failure->max_residual
                << " > tolerance " << failure->tolerance << '\n';
            return 1;
        }
        return 0;
    } catch (const Error& e) {
        err << "defectgeo: " << e.kind() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "defectgeo: error: " << e.what() << '\n';
        return 2;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace defectgeo::cli

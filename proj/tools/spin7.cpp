// Command-line front end: critical-points, shoot, sweep, bisect,
// reconstruct, verify.  Exit codes: 0 success, 2 bad input, 3 numerical
// failure, 4 property failure.

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "spin7/critical_points.hpp"
#include "spin7/invariant_sets.hpp"
#include "spin7/io.hpp"
#include "spin7/metric_recon.hpp"
#include "spin7/rng.hpp"
#include "spin7/shooting.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitProperty = 4;

using namespace spin7;

Fiber parse_orbit(const std::string& s) {
    if (s == "kplusl" || s == "k+l") return Fiber::KplusL;
    if (s == "l") return Fiber::L;
    if (s == "k") return Fiber::K;
    throw DomainError("unknown orbit '" + s + "' (expected kplusl, l, or k)");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open output file " + path);
    body(os);
}

Manifest base_manifest(const std::string& cmdline, const CoprimePair& pair) {
    Manifest m;
    m.add("command", cmdline);
    m.add("version", std::string(kVersion));
    m.add("k", pair.k());
    m.add("l", pair.l());
    m.add("delta", pair.delta());
    return m;
}

void add_integrator(Manifest& m, const IntegratorSettings& s) {
    m.add("rtol", s.rtol);
    m.add("atol", s.atol);
    m.add("eta_max_span", s.eta_max_span);
    m.add("max_steps", s.max_steps);
    m.add("projection", std::string(to_string(s.projection)));
    m.add("sample_stride", s.sample_stride);
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

int cmd_critical_points(long k, long l) {
    const CoprimePair pair(k, l);
    std::vector<CriticalPoint> pts;
    try {
        pts = all_critical_points(pair);
    } catch (const NoConvergenceError& e) {
        std::cerr << "solve_ac failed: " << e.what() << "\n";
        return kExitNumerical;
    }
    bool ok = true;
    std::cout << "label,X1,X2,X3,X4,Z1,Z2,Z3,Z4,field_norm,residual_norm\n";
    for (const auto& cp : pts) {
        const double field = max_abs(vector_field(cp.point, pair).derivative);
        double resid;
        if (cp.branch) {
            resid = residuals(cp.point, pair, *cp.branch).max_norm();
        } else {
            resid = std::min(residuals(cp.point, pair, Branch::plus).max_norm(),
                             residuals(cp.point, pair, Branch::minus).max_norm());
        }
        std::cout << cp.label();
        for (int i = 0; i < 8; ++i) std::cout << ',' << fmt17(cp.point[i]);
        std::cout << ',' << fmt17(field) << ',' << fmt17(resid) << "\n";
        if (field > 1e-12 || resid > 1e-12) {
            std::cerr << cp.label() << ": residual above 1e-12\n";
            ok = false;
        }
    }
    return ok ? kExitOk : kExitProperty;
}

int cmd_shoot(const std::string& cmdline, long k, long l, const std::string& orbit_name,
              double theta, double epsilon, double span, const std::string& out_prefix) {
    const CoprimePair pair(k, l);
    const OrbitLabel orbit(parse_orbit(orbit_name), pair);
    Timer timer;

    ShootConfig cfg;
    cfg.theta = theta;
    cfg.epsilon = epsilon;
    if (span > 0) cfg.integrator.eta_max_span = span;

    ShootResult res;
    try {
        res = classify(pair, orbit, cfg);
    } catch (const NoConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    if (res.trajectory.terminal == Terminal::StepFailure) {
        std::cerr << "numerical failure: step controller underflow\n";
        return kExitNumerical;
    }

    const std::string csv_path = out_prefix + ".csv";
    const std::string manifest_path = out_prefix + ".manifest";
    write_file(csv_path, [&](std::ostream& os) { write_trajectory_csv(os, res.trajectory); });

    Manifest m = base_manifest(cmdline, pair);
    m.add("orbit", std::string(to_string(orbit.fiber)));
    m.add("branch", std::string(to_string(orbit.branch())));
    m.add("theta", cfg.theta);
    m.add("epsilon", cfg.epsilon);
    add_integrator(m, cfg.integrator);
    m.add("fate", std::string(to_string(res.fate)));
    m.add("entered", res.entered ? *res.entered : "none");
    m.add("terminal", std::string(to_string(res.trajectory.terminal)));
    m.add("eta_end", res.trajectory.back().eta);
    m.add("samples", long(res.trajectory.samples.size()));
    m.add("output", csv_path);
    m.add("wall_seconds", timer.seconds());
    write_file(manifest_path, [&](std::ostream& os) { m.write(os); });

    std::cout << "fate " << to_string(res.fate) << "\n";
    if (res.fate == Fate::Undetermined) {
        std::cerr << "property failure: fate undetermined within span\n";
        return kExitProperty;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& cmdline, long k, long l, const std::string& orbit_name,
              int count, double theta_min, double theta_max, int jobs,
              const std::string& out_path) {
    const CoprimePair pair(k, l);
    const OrbitLabel orbit(parse_orbit(orbit_name), pair);
    if (count < 2) throw DomainError("sweep: --count must be >= 2");
    Timer timer;

    struct Row {
        double theta;
        Fate fate;
        std::string entered;
        double eta_end;
    };
    std::vector<Row> rows(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            const double th = theta_min + (theta_max - theta_min) * i / double(count - 1);
            ShootConfig cfg;
            cfg.theta = th;
            const ShootResult r = classify(pair, orbit, cfg);
            rows[i] = {th, r.fate, r.entered ? *r.entered : "none",
                       r.trajectory.back().eta};
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    write_file(out_path, [&](std::ostream& os) {
        os << "theta,fate,entered,eta_end\n";
        for (const auto& r : rows)
            os << fmt17(r.theta) << ',' << to_string(r.fate) << ',' << r.entered << ','
               << fmt17(r.eta_end) << "\n";
    });
    Manifest m = base_manifest(cmdline, pair);
    m.add("orbit", std::string(to_string(orbit.fiber)));
    m.add("count", long(count));
    m.add("jobs", long(jobs));
    m.add("output", out_path);
    m.add("wall_seconds", timer.seconds());
    write_file(out_path + ".manifest", [&](std::ostream& os) { m.write(os); });
    return kExitOk;
}

int cmd_bisect(const std::string& cmdline, long k, long l, const std::string& orbit_name,
               double tol, const std::string& out_prefix) {
    const CoprimePair pair(k, l);
    const OrbitLabel orbit(parse_orbit(orbit_name), pair);
    Timer timer;

    BisectResult res;
    try {
        res = bisect_theta(pair, orbit, tol);
    } catch (const BracketInvalidError& e) {
        std::cerr << "property failure: " << e.what() << "\n";
        return kExitProperty;
    } catch (const NoSeparatrixError& e) {
        std::cerr << "property failure: " << e.what() << "\n";
        return kExitProperty;
    } catch (const NoConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }

    const std::string csv_path = out_prefix + ".csv";
    write_file(csv_path,
               [&](std::ostream& os) { write_trajectory_csv(os, res.boundary.trajectory); });
    Manifest m = base_manifest(cmdline, pair);
    m.add("orbit", std::string(to_string(orbit.fiber)));
    m.add("branch", std::string(to_string(orbit.branch())));
    m.add("tol_theta", tol);
    m.add("theta_i", res.theta_i);
    m.add("min_distance_ac", res.min_distance_ac);
    m.add("boundary_fate", std::string(to_string(res.boundary.fate)));
    m.add("output", csv_path);
    m.add("wall_seconds", timer.seconds());
    write_file(out_prefix + ".manifest", [&](std::ostream& os) { m.write(os); });

    std::cout << "theta_i " << fmt17(res.theta_i) << "\n";
    return kExitOk;
}

int cmd_reconstruct(long k, long l, const std::string& in_csv, double gauge,
                    const std::string& out_prefix) {
    const CoprimePair pair(k, l);
    Trajectory traj;
    {
        std::ifstream is(in_csv);
        if (!is) {
            std::cerr << "cannot open " << in_csv << "\n";
            return kExitInput;
        }
        try {
            traj = read_trajectory_csv(is);
        } catch (const CsvParseError& e) {
            std::cerr << e.what() << "\n";
            return kExitInput;
        }
    }
    const MetricProfile prof = reconstruct(traj, pair, gauge);
    write_file(out_prefix + ".csv", [&](std::ostream& os) { write_profile_csv(os, prof); });

    Manifest m;
    m.add("input", in_csv);
    m.add("gauge_trL0", gauge);
    try {
        const Asymptotics a = classify_asymptotics(prof);
        m.add("kind", std::string(to_string(a.kind)));
        if (a.f_limit) m.add("f_limit", *a.f_limit);
        if (a.slopes) {
            m.add("slope_a", (*a.slopes)[0]);
            m.add("slope_b", (*a.slopes)[1]);
            m.add("slope_c", (*a.slopes)[2]);
            m.add("slope_f", (*a.slopes)[3]);
        }
        m.add("fit_t_lo", a.t_lo);
        m.add("fit_t_hi", a.t_hi);
        m.add("fit_residual", a.fit_residual);
    } catch (const WindowTooShortError& e) {
        m.add("kind", std::string("WindowTooShort"));
        m.add("note", std::string(e.what()));
    }
    write_file(out_prefix + ".report", [&](std::ostream& os) { m.write(os); });
    return kExitOk;
}

// --- verify suites -------------------------------------------------------

struct VerifyReport {
    bool all_pass = true;
    void check(const std::string& name, bool pass, const std::string& witness = "") {
        std::cout << (pass ? "PASS " : "FAIL ") << name;
        if (!witness.empty()) std::cout << "  worst: " << witness;
        std::cout << "\n";
        all_pass = all_pass && pass;
    }
};

void verify_polynomials(VerifyReport& rep) {
    CounterRng rng(0x5eed5eed);
    const int n = 100000;

    auto sample_box = [&](double lo, double hi, auto&& f, const char* name, double slack) {
        double worst = std::numeric_limits<double>::infinity();
        double wa = 0, wb = 0;
        for (int i = 0; i < n; ++i) {
            const double a = rng.uniform(lo, hi), b = rng.uniform(lo, hi);
            const double v = f(a, b);
            if (v < worst) {
                worst = v;
                wa = a;
                wb = b;
            }
        }
        std::ostringstream w;
        w << "value " << worst << " at (" << wa << "," << wb << ")";
        rep.check(name, worst >= -slack, w.str());
    };

    sample_box(1, 20, [](double a, double b) { return xi_polys(a, b)[0]; },
               "xi0 >= 0 on [1,20]^2", 1e-12);
    sample_box(1, 20, [](double a, double b) { return xi_polys(a, b)[1]; },
               "xi1 > 0 on [1,20]^2", 0.0);
    sample_box(1, 20, [](double a, double b) { return xi_polys(a, b)[2]; },
               "xi2 >= 0 on [1,20]^2", 1e-12);
    sample_box(0, 20, [](double a, double b) { return theta_polys(a, b)[0]; },
               "theta0 >= 0 on [0,20]^2", 1e-12);
    sample_box(0, 20, [](double a, double b) { return theta_polys(a, b)[1]; },
               "theta1 > 0 on [0,20]^2", 0.0);
    sample_box(0, 20, [](double a, double b) { return theta_polys(a, b)[2]; },
               "theta2 >= 0 on [0,20]^2", 1e-12);
    sample_box(0, 20, [](double a, double b) { return phi2_ratio(a, b); },
               "phi2 >= 0 on [0,20]^2", 1e-12);

    // delta identity at 1e5 random points of [0,1]^3 (pair enters Phi only).
    const CoprimePair pair(2, 1);
    double worst = 0;
    std::string witness;
    for (int i = 0; i < n; ++i) {
        const double z1 = rng.next_double(), z2 = rng.next_double(), z3 = rng.next_double();
        const PhiReport pr = phi_polys(z1, z2, z3, pair);
        const double err =
            std::abs(pr.delta - pr.delta_closed_form) / (1 + std::abs(pr.delta));
        if (err > worst) {
            worst = err;
            std::ostringstream w;
            w << "rel err " << err << " at (" << z1 << "," << z2 << "," << z3 << ")";
            witness = w.str();
        }
    }
    rep.check("delta identity on [0,1]^3", worst < 1e-10, witness);
}

void verify_sets(VerifyReport& rep, const CoprimePair& pair) {
    // Nesting: D inside C_Spin of the branch, W inside its branch surface.
    bool nest = true;
    for (Branch br : {Branch::plus, Branch::minus}) {
        const auto d_tag = br == Branch::plus ? SetId::Tag::DPlus : SetId::Tag::DMinus;
        const auto c_tag = br == Branch::plus ? SetId::Tag::CSpinPlus : SetId::Tag::CSpinMinus;
        // Walk a trajectory into D and check every in-D sample is on-branch.
        const OrbitLabel orbit(br == Branch::plus ? Fiber::KplusL : Fiber::L, pair);
        ShootConfig cfg;
        cfg.theta = 0.05;
        cfg.integrator.eta_max_span = 60;
        const auto tr = integrate(seed(pair, orbit, cfg), pair, br, cfg.integrator);
        for (const auto& s : tr.samples)
            if (member(s.point, SetId(d_tag), pair).inside &&
                !member(s.point, SetId(c_tag), pair).inside)
                nest = false;
    }
    rep.check("nesting D subset of C_Spin", nest);

    // P_* sits on the boundary of B-.
    const double d = pair.delta();
    const double k = pair.k(), l = pair.l();
    const PhasePoint pstar{-k * l / (3 * d),
                           (k + l) * k / (3 * d),
                           (k + l) * l / (3 * d),
                           1.0 / 3,
                           (k + l) * (k + l) / (3 * d),
                           l * l / (3 * d),
                           k * k / (3 * d),
                           6 * d * d / (k * l * (k + l))};
    const Membership mb = member(pstar, SetId(SetId::Tag::BMinus), pair);
    rep.check("P_* on boundary of B-", mb.inside && std::abs(mb.margin) < 1e-9,
              "margin " + std::to_string(mb.margin));

    // Boundary flow-compatibility of D+/D- along the fiber-weight wall and
    // of B along {X4 - X1 - X2 - X3 = 0}: outward derivative <= 1e-10.
    CounterRng rng(0xb0a7);
    for (Branch br : {Branch::plus, Branch::minus}) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 1000; ++i) {
            // Random point of the branch surface on the wall: pick Z ratios
            // honoring the D ordering, rescale Z4 to sit on fw = 2*delta.
            PhasePoint p{};
            const double z1 = rng.uniform(0.01, 0.3);
            double z2 = rng.uniform(0.01, 0.3), z3 = rng.uniform(0.01, 0.3);
            if (br == Branch::plus) {
                z2 = z1 + rng.uniform(0, 0.3);
                z3 = z1 + rng.uniform(0, 0.3);
            } else {
                z2 = z1 * rng.next_double();
                z3 = z1 * rng.next_double();
            }
            p.z1 = z1;
            p.z2 = z2;
            p.z3 = z3;
            p.z4 = 1.0;
            double fw = fiber_weight(p, pair);
            if (fw <= 0) continue;
            p.z4 = 2.0 * pair.delta() / fw;
            // Alternate the surface projection (which rescales Z1..Z3 and so
            // moves fw) with a Z4 rescale back onto the wall; draws that the
            // projection pushes off the cone are discarded.
            bool bad = false;
            for (int it = 0; it < 8 && !bad; ++it) {
                detail::project_full(p, pair, br);
                if (p.z1 < 1e-5 || p.z2 < 1e-5 || p.z3 < 1e-5 || p.z4 < 1e-5) {
                    bad = true;
                    break;
                }
                fw = fiber_weight(p, pair);
                if (fw <= 0) {
                    bad = true;
                    break;
                }
                p.z4 *= 2.0 * pair.delta() / fw;
            }
            if (bad) continue;
            detail::project_full(p, pair, br);
            if (p.z1 < 1e-5 || p.z2 < 1e-5 || p.z3 < 1e-5 || p.z4 < 1e-5) continue;
            if (std::abs(fiber_weight(p, pair) - 2 * pair.delta()) > 1e-6) continue;
            // Outward derivative of fw along the field.
            const Vec8 f = vector_field(p, pair).derivative;
            const double h = 1e-7;
            PhasePoint q = p;
            for (int j = 0; j < 8; ++j) q[j] += h * f[j];
            const double dfw = (fiber_weight(q, pair) - fiber_weight(p, pair)) / h;
            worst = std::max(worst, dfw);
        }
        rep.check(std::string("fiber-weight wall non-escaping, branch ") + to_string(br),
                  worst <= 1e-6, "max outward derivative " + std::to_string(worst));
    }
}

void verify_monotone(VerifyReport& rep, const CoprimePair& pair) {
    bool ok = true;
    std::string witness;
    for (Fiber f : {Fiber::KplusL, Fiber::L, Fiber::K}) {
        const OrbitLabel orbit(f, pair);
        for (double th : {0.3, 1.0, 2.0, 2.8}) {
            ShootConfig cfg;
            cfg.theta = th;
            cfg.integrator.eta_max_span = 60;
            const auto tr = integrate(seed(pair, orbit, cfg), pair, orbit.branch(),
                                      cfg.integrator);
            const auto rep_m = monotone_check(tr);
            if (!rep_m.ok()) {
                ok = false;
                witness = std::string(to_string(f)) + " theta " + std::to_string(th);
            }
        }
    }
    rep.check("Z4/(Z1 Z2 Z3)^2 non-increasing", ok, witness);
}

int cmd_verify(const std::string& suite, long k, long l) {
    const CoprimePair pair(k, l);
    VerifyReport rep;
    if (suite == "polynomials" || suite == "all") verify_polynomials(rep);
    if (suite == "sets" || suite == "all") verify_sets(rep, pair);
    if (suite == "monotone" || suite == "all") verify_monotone(rep, pair);
    if (suite != "polynomials" && suite != "sets" && suite != "monotone" && suite != "all")
        throw DomainError("unknown suite '" + suite + "'");
    return rep.all_pass ? kExitOk : kExitProperty;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cohomogeneity-one Spin(7) phase-flow toolkit"};
    app.require_subcommand(1);
    const std::string cmdline = join_args(argc, argv);

    long k = 2, l = 1;
    auto add_pair = [&](CLI::App* sub) {
        sub->add_option("--k", k, "first winding integer")->required();
        sub->add_option("--l", l, "second winding integer")->required();
    };

    auto* cp = app.add_subcommand("critical-points", "list all critical points");
    add_pair(cp);

    std::string orbit = "kplusl", out_prefix = "run", out_path = "sweep.csv";
    double theta = 0.05, epsilon = 1e-6, span = -1, tol = 1e-8, gauge = 1.0;
    double theta_min = 0.05, theta_max = 3.0916;
    int count = 200, jobs = 1;
    std::string in_csv;

    auto* sh = app.add_subcommand("shoot", "integrate and classify one gamma_theta");
    add_pair(sh);
    sh->add_option("--orbit", orbit, "kplusl, l, or k")->required();
    sh->add_option("--theta", theta, "shooting angle in [0, pi]")->required();
    sh->add_option("--epsilon", epsilon, "seed offset amplitude");
    sh->add_option("--span", span, "eta span override");
    sh->add_option("--out-prefix", out_prefix, "output file prefix");

    auto* sw = app.add_subcommand("sweep", "classify a theta grid");
    add_pair(sw);
    sw->add_option("--orbit", orbit)->required();
    sw->add_option("--count", count, "grid size");
    sw->add_option("--theta-min", theta_min);
    sw->add_option("--theta-max", theta_max);
    sw->add_option("--jobs", jobs, "worker threads");
    sw->add_option("--out", out_path, "output CSV path");

    auto* bi = app.add_subcommand("bisect", "bisect for the transition angle theta_i");
    add_pair(bi);
    bi->add_option("--orbit", orbit)->required();
    bi->add_option("--tol", tol, "theta bracket tolerance");
    bi->add_option("--out-prefix", out_prefix);

    auto* rc = app.add_subcommand("reconstruct", "metric profile from a trajectory CSV");
    add_pair(rc);
    rc->add_option("--in", in_csv, "trajectory CSV")->required();
    rc->add_option("--gauge", gauge, "trL at the first sample");
    rc->add_option("--out-prefix", out_prefix);

    std::string suite = "all";
    auto* vf = app.add_subcommand("verify", "property verification suites");
    add_pair(vf);
    vf->add_option("--suite", suite, "polynomials, sets, monotone, or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitInput;
    }

    try {
        if (cp->parsed()) return cmd_critical_points(k, l);
        if (sh->parsed())
            return cmd_shoot(cmdline, k, l, orbit, theta, epsilon, span, out_prefix);
        if (sw->parsed())
            return cmd_sweep(cmdline, k, l, orbit, count, theta_min, theta_max, jobs,
                             out_path);
        if (bi->parsed()) return cmd_bisect(cmdline, k, l, orbit, tol, out_prefix);
        if (rc->parsed()) return cmd_reconstruct(k, l, in_csv, gauge, out_prefix);
        if (vf->parsed()) return cmd_verify(suite, k, l);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}

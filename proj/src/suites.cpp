#include "folab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "folab/coeff_ring.hpp"
#include "folab/errors.hpp"
#include "folab/jet.hpp"
#include "folab/wiener_hopf.hpp"

namespace folab {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTaylorTol = 1e-4;
constexpr double kFourierTol = 1e-8;
constexpr double kWitnessFloor = 1e-3;
constexpr double kRefinementRatio = 4.0;
constexpr int kDemoRows = 150;

template <class T>
T get_field(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: field " + where + key + " has the wrong type");
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

std::string comparison_name(Comparison c) {
    switch (c) {
        case Comparison::AtMost: return "<=";
        case Comparison::AtLeast: return ">=";
        case Comparison::Equal: return "==";
    }
    return "?";
}

double rel_distance(const GaussPolyFn& a, const GaussPolyFn& b) {
    const double s = std::max(sup_norm(a), sup_norm(b));
    return s == 0.0 ? 0.0 : sup_distance(a, b) / s;
}

double rel_distance(const GridFn& a, const GridFn& b) {
    const double s = std::max(sup_norm(a), sup_norm(b));
    return s == 0.0 ? 0.0 : sup_distance(a, b) / s;
}

template <class C>
double jet_rel_distance(const Jet<C>& a, const Jet<C>& b) {
    double m = 0.0;
    for (int n = 0; n <= std::min(a.order(), b.order()); ++n) m = std::max(m, rel_distance(a[n], b[n]));
    return m;
}

GridSpec halved(GridSpec g) {
    g.x_step /= 2.0;
    g.t_step /= 2.0;
    return g;
}

// Collects records; a check body that throws becomes a failed record.
class Recorder {
public:
    explicit Recorder(SuiteReport& r) : report_(r) {}

    void check(const std::string& name, const std::string& anchor, double tolerance, Comparison cmp,
               const std::function<double(json&)>& body) {
        CheckRecord rec{name, anchor, false, std::numeric_limits<double>::quiet_NaN(), tolerance, cmp, json::object()};
        try {
            rec.measured = body(rec.details);
            switch (cmp) {
                case Comparison::AtMost: rec.passed = rec.measured <= tolerance; break;
                case Comparison::AtLeast: rec.passed = rec.measured >= tolerance; break;
                case Comparison::Equal: rec.passed = rec.measured == tolerance; break;
            }
        } catch (const std::exception& e) {
            rec.details["error"] = e.what();
        }
        report_.records.push_back(std::move(rec));
    }

    void dump(std::string name, std::string contents) { report_.dumps.push_back({std::move(name), std::move(contents)}); }

private:
    SuiteReport& report_;
};

std::string kname(const std::string& base, int k) { return base + " k=" + std::to_string(k); }

void coeff_suite(const SuiteConfig& cfg, Recorder& rec) {
    std::mt19937_64 rng(cfg.seed);
    const double eq = cfg.tolerances.equality;
    std::vector<GaussPolyFn> f, g, h;
    for (int i = 0; i < cfg.trials; ++i) {
        f.push_back(random_gauss_poly(rng));
        g.push_back(random_gauss_poly(rng));
        h.push_back(random_gauss_poly(rng));
    }
    auto over_trials = [&](auto&& body) {
        double m = 0.0;
        for (int i = 0; i < cfg.trials; ++i) m = std::max(m, body(f[i], g[i], h[i]));
        return m;
    };
    rec.check("exact convolution associative", "convolution algebra of the time line", eq, Comparison::AtMost, [&](json&) {
        return over_trials([](auto& a, auto& b, auto& c) {
            return rel_distance(convolve(convolve(a, b), c), convolve(a, convolve(b, c)));
        });
    });
    rec.check("exact convolution commutative", "convolution algebra of the time line", eq, Comparison::AtMost, [&](json&) {
        return over_trials([](auto& a, auto& b, auto&) { return rel_distance(convolve(a, b), convolve(b, a)); });
    });
    rec.check("t is a derivation", "delta(f)(t) = t f(t) is a derivation", eq, Comparison::AtMost, [&](json&) {
        return over_trials([](auto& a, auto& b, auto&) {
            return rel_distance(mul_by_t(convolve(a, b)), add(convolve(mul_by_t(a), b), convolve(a, mul_by_t(b))));
        });
    });
    rec.check("e^t is an automorphism", "Delta(f)(t) = e^t f(t) is an automorphism", eq, Comparison::AtMost, [&](json&) {
        return over_trials([](auto& a, auto& b, auto&) {
            return rel_distance(mul_by_exp(convolve(a, b), 1.0), convolve(mul_by_exp(a, 1.0), mul_by_exp(b, 1.0)));
        });
    });
    const double step = cfg.grid.t_step;
    rec.check("sampled convolution matches exact", "plumbing", cfg.tolerances.quadrature, Comparison::AtMost, [&](json& d) {
        d["t_step"] = step;
        return over_trials([step](auto& a, auto& b, auto&) {
            return rel_distance(convolve(a.to_grid(step), b.to_grid(step)), convolve(a, b).to_grid(step));
        });
    });
}

void flow_suite(const SuiteConfig& cfg, Recorder& rec) {
    std::mt19937_64 rng(cfg.seed);
    const int order = std::min(cfg.max_jet_order, FlowTaylorTable::kDefaultMaxOrder);
    for (int k : cfg.k_values) {
        for (auto v : {FlowVariant::Monomial, FlowVariant::CompleteRescaled}) {
            const FlowModel model(k, v);
            rec.check(kname("group law " + to_string(v), k), "flow of x^k d/dx", 1e-8, Comparison::AtMost,
                      [&](json&) { return group_law_residual(model, 100 * cfg.trials, rng); });
        }
        rec.check(kname("cocycle identity", k), "identities satisfied by the Taylor coefficients of the flow",
                  cfg.tolerances.equality, Comparison::AtMost, [&](json& d) {
                      d["max_order"] = order;
                      return cocycle_residual(k, order, 20 * cfg.trials, rng);
                  });
        rec.check(kname("composition identity", k), "identities satisfied by the Taylor coefficients of the flow",
                  cfg.tolerances.equality, Comparison::AtMost, [&](json&) {
                      double m = 0.0;
                      for (int mm = 0; mm <= order; ++mm)
                          for (int n = 0; n <= mm; ++n)
                              m = std::max(m, check_composition_identity(k, n, mm, cfg.trials, rng, order));
                      return m;
                  });
    }
    std::ostringstream csv;
    for (int k : cfg.k_values) write_json(csv, monomial_taylor_table(k, order));
    rec.dump("taylor_tables.json", csv.str());
}

void groupoid_suite(const SuiteConfig& cfg, Recorder& rec) {
    const double quad = cfg.tolerances.quadrature;
    const int max_p = std::min(cfg.max_jet_order, 3);
    std::ostringstream csv;
    csv << "k,check,coarse,fine,ratio\n";
    auto refine = [&](const std::string& what, int k, double tol, const std::string& anchor, auto&& measure) {
        Refinement r;
        rec.check(kname(what, k), anchor, tol, Comparison::AtMost, [&](json& d) {
            r = measure();
            d["step"] = cfg.grid.x_step;
            d["half_step_value"] = r.fine;
            csv << k << ',' << what << ',' << r.coarse << ',' << r.fine << ',' << r.ratio() << '\n';
            return r.coarse;
        });
        rec.check(kname(what + " refinement ratio", k), "plumbing", kRefinementRatio, Comparison::AtLeast,
                  [&](json&) { return r.ratio(); });
    };
    for (int k : cfg.k_values) {
        const FlowModel flow(k);
        const auto seed = cfg.seed + static_cast<std::uint64_t>(k);
        refine("associativity", k, quad, "convolution on the transformation groupoid",
               [&] { return associativity_error(k, cfg.grid, cfg.trials, seed); });
        refine("adjoint anti-multiplicativity", k, quad, "involution on the transformation groupoid",
               [&] { return anti_multiplicativity_error(k, cfg.grid, cfg.trials, seed); });
        refine("Taylor map homomorphism", k, kTaylorTol, "the Taylor map transfers the ring structure",
               [&] { return taylor_homomorphism_error(k, max_p, cfg.grid, cfg.trials, seed); });

        std::mt19937_64 rng(seed);
        std::vector<GroupoidKernel> f, g;
        for (int i = 0; i < cfg.trials; ++i) {
            f.push_back(suite_kernel(rng, flow, cfg.grid));
            g.push_back(suite_kernel(rng, flow, cfg.grid));
        }
        rec.check(kname("adjoint is an involution", k), "involution on the transformation groupoid", quad,
                  Comparison::AtMost, [&](json&) {
                      double m = 0.0;
                      for (const auto& a : f) m = std::max(m, relative_distance(adjoint(adjoint(a)), a));
                      return m;
                  });
        rec.check(kname("module action associative", k), "C(R) acts on the convolution algebra", quad,
                  Comparison::AtMost, [&](json&) {
                      const auto a = BaseFn::bump(0.1, 1.5, 2.0);
                      double m = 0.0;
                      for (int i = 0; i < cfg.trials; ++i) {
                          m = std::max(m, relative_distance(module_mult_left(a, convolve(f[i], g[i])),
                                                            convolve(module_mult_left(a, f[i]), g[i])));
                          m = std::max(m, relative_distance(module_mult_right(convolve(f[i], g[i]), a),
                                                            convolve(f[i], module_mult_right(g[i], a))));
                      }
                      return m;
                  });
        rec.check(kname("x f = Delta(f) x", k), "xf = Delta(f)x", cfg.tolerances.equality, Comparison::AtMost,
                  [&](json&) {
                      double m = 0.0;
                      for (const auto& a : f)
                          m = std::max(m, relative_distance(module_mult_left(BaseFn::identity(), a),
                                                            module_mult_right(delta_multiply(a), BaseFn::identity())));
                      return m;
                  });
        rec.check(kname("L1 norm submultiplicative", k), "L1 norm of the groupoid", 1.0 + quad, Comparison::AtMost,
                  [&](json&) {
                      double m = 0.0;
                      for (int i = 0; i < cfg.trials; ++i)
                          m = std::max(m, l1_groupoid_norm(convolve(f[i], g[i])) /
                                              (l1_groupoid_norm(f[i]) * l1_groupoid_norm(g[i])));
                      return m;
                  });
    }
    rec.dump("groupoid_refinement.csv", csv.str());
}

void jets_suite(const SuiteConfig& cfg, Recorder& rec) {
    std::mt19937_64 rng(cfg.seed);
    const double eq = cfg.tolerances.equality;
    std::ostringstream csv;
    csv << "k,order,max_commutator,witness_norm,expected_commutative\n";
    for (int k : cfg.k_values) {
        const auto rows = commutativity_report(k, cfg.max_jet_order, cfg.trials, rng);
        for (const auto& r : rows) {
            csv << k << ',' << r.order << ',' << r.max_commutator << ',' << r.witness_norm << ','
                << (r.expected_commutative ? 1 : 0) << '\n';
            const std::string name = "commutator k=" + std::to_string(k) + " order=" + std::to_string(r.order);
            if (r.expected_commutative)
                rec.check(name, "jets are commutative below order k", eq, Comparison::AtMost,
                          [&](json&) { return r.max_commutator; });
            else
                rec.check(name + " witness", "jets are not commutative from order k", kWitnessFloor,
                          Comparison::AtLeast, [&](json&) { return r.witness_norm; });
        }
        rec.check(kname("x-multiplication relation", k), k == 1 ? "xf = Delta(f)x" : "xf = fx + delta(f)x^k", eq,
                  Comparison::AtMost, [&](json&) { return relation_residual(k, 4 * cfg.trials, rng); });
        rec.check(kname("jet product associative", k), "twisted truncated series ring", eq, Comparison::AtMost,
                  [&](json&) {
                      double m = 0.0;
                      for (int i = 0; i < cfg.trials; ++i) {
                          const auto a = random_exact_jet(rng, k, cfg.max_jet_order);
                          const auto b = random_exact_jet(rng, k, cfg.max_jet_order);
                          const auto c = random_exact_jet(rng, k, cfg.max_jet_order);
                          m = std::max(m, jet_rel_distance(jet_mul(jet_mul(a, b), c), jet_mul(a, jet_mul(b, c))));
                      }
                      return m;
                  });
        rec.check(kname("truncation compatible", k), "ideals generated by powers of x", eq, Comparison::AtMost,
                  [&](json&) {
                      double m = 0.0;
                      for (int i = 0; i < cfg.trials; ++i) {
                          const auto a = random_exact_jet(rng, k, cfg.max_jet_order);
                          const auto b = random_exact_jet(rng, k, cfg.max_jet_order);
                          for (int q = 0; q < cfg.max_jet_order; ++q)
                              m = std::max(m, jet_rel_distance(truncate(jet_mul(a, b), q),
                                                               jet_mul(truncate(a, q), truncate(b, q))));
                      }
                      return m;
                  });
    }
    rec.dump("jet_commutativity.csv", csv.str());
}

GridFn generator_b(double step) {
    const auto n = static_cast<std::size_t>(std::lround(80.0 / step)) + 1;
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = std::exp(-0.5 * static_cast<double>(j) * step);
    return GridFn(0.0, step, std::move(v), 2.0);
}

void index_suite(const SuiteConfig& cfg, Recorder& rec) {
    const double step = std::min(cfg.grid.t_step, 0.01);
    const auto b = generator_b(step);
    rec.check("generator transform matches closed form", "Fourier transform convention", kFourierTol,
              Comparison::AtMost, [&](json& d) {
                  std::vector<double> s;
                  for (int i = -40; i <= 40; ++i) s.push_back(0.125 * i);
                  const auto got = fourier_transform_line(b, s);
                  double m = 0.0;
                  for (std::size_t i = 0; i < s.size(); ++i)
                      m = std::max(m, std::abs(got[i] - 1.0 / (0.5 + 2.0 * kPi * cplx{0.0, 1.0} * s[i])));
                  d["t_step"] = step;
                  return m;
              });
    WindingReport wr;
    bool have = false;
    rec.check("winding of 1 - bhat", "[1-b] is sent to -1", 1.0, Comparison::Equal, [&](json& d) {
        const auto loop = fourier_loop(b, 256, 0.2, "1-bhat").map([](cplx v) { return 1.0 - v; }, "1-bhat");
        wr = winding_number(loop, cfg.tolerances.winding_residual);
        have = true;
        std::ostringstream os;
        write_json(os, wr);
        d = json::parse(os.str());
        std::ostringstream csv;
        csv << "s,re,im\n";
        const auto s = loop.line_points();
        for (std::size_t j = 1; j < s.size(); ++j) csv << s[j] << ',' << loop.values()[j].real() << ',' << loop.values()[j].imag() << '\n';
        rec.dump("winding_loop.csv", csv.str());
        return wr.winding;
    });
    rec.check("boundary index of 1 - bhat", "[1-b] is sent to -1", -1.0, Comparison::Equal, [&](json&) {
        if (!have) throw std::runtime_error("winding unavailable");
        return wr.boundary_index;
    });
    rec.check("winding residual of 1 - bhat", "plumbing", cfg.tolerances.winding_residual, Comparison::AtMost,
              [&](json&) {
                  if (!have) throw std::runtime_error("winding unavailable");
                  return wr.residual;
              });
    rec.check("winding of z^n for n in -2..2", "Toeplitz index is minus the winding number", 0.0, Comparison::AtMost,
              [&](json&) {
                  double m = 0.0;
                  for (int n = -2; n <= 2; ++n) {
                      const auto r = winding_number(SymbolLoop::circle([n](cplx z) { return std::pow(z, n); }, 64),
                                                    cfg.tolerances.winding_residual);
                      m = std::max(m, static_cast<double>(std::abs(r.winding - n) + std::abs(r.boundary_index + n)));
                  }
                  return m;
              });
    auto counts = [&](const std::string& name, const std::function<cplx(cplx)>& f, std::size_t ker, std::size_t coker) {
        rec.check("finite section counts " + name, "plumbing", 0.0, Comparison::AtMost, [&](json& d) {
            const auto c = finite_section_kernel_counts(toeplitz_finite_section(SymbolLoop::circle(f, 128, name), 50), 1e-10);
            d["kernel"] = c.kernel;
            d["cokernel"] = c.cokernel;
            return static_cast<double>((c.kernel != ker) + (c.cokernel != coker));
        });
    };
    counts("1", [](cplx) { return cplx{1.0}; }, 0, 0);
    counts("z", [](cplx z) { return z; }, 1, 1);
    counts("2+z", [](cplx z) { return 2.0 + z; }, 0, 0);
    rec.check("Cayley images orthonormal", "W maps the circle Hardy space onto the line Hardy space",
              cfg.tolerances.quadrature, Comparison::AtMost, [&](json&) {
                  const auto g = cayley_gram({0, 1, 2, 3, 4, 5});
                  return (g - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff();
              });
}

void classify_suite(const SuiteConfig& cfg, Recorder& rec) {
    std::ostringstream csv;
    csv << "k,variant,direction,e1,e2,parity_invariant\n";
    for (int k : cfg.k_values) {
        const FlowModel m(k);
        const auto e = flow_bi_index(m);
        for (const auto& model : {m, FlowModel(k, FlowVariant::CompleteRescaled), m.reversed()}) {
            const auto x = flow_bi_index(model);
            csv << k << ',' << to_string(model.variant) << ',' << model.direction << ',' << x.left << ',' << x.right
                << ',' << parity_invariant(x) << '\n';
        }
        rec.check(kname("parity invariant", k), "same parity classifies the algebras", 2.0 * (k % 2), Comparison::Equal,
                  [&](json& d) {
                      std::ostringstream os;
                      write_json(os, m, e);
                      d = json::parse(os.str());
                      return std::abs(parity_invariant(e));
                  });
        rec.check(kname("bi-index invariant under variant switch", k), "plumbing", 0.0, Comparison::AtMost, [&](json&) {
            return flow_bi_index(FlowModel(k, FlowVariant::CompleteRescaled)) == e ? 0.0 : 1.0;
        });
        rec.check(kname("bi-index negated under time reversal", k), "source and sink swap under reversal", 0.0,
                  Comparison::AtMost, [&](json&) {
                      const auto r = flow_bi_index(m.reversed());
                      return r.left == -e.left && r.right == -e.right ? 0.0 : 1.0;
                  });
    }
    rec.dump("bi_index.csv", csv.str());
}

void demo_suite(const SuiteConfig& cfg, Recorder& rec) {
    const GaussianSymbol gauss{1.0, 1.0};
    NonpreservationResult main;
    bool have = false;
    rec.check("pulled-back term falls below a/10", "not preserved by U", 0.1, Comparison::AtMost, [&](json& d) {
        main = nonpreservation_demo(Diffeomorphism::sinh(), gauss, gauss, kDemoRows);
        have = true;
        double best = std::numeric_limits<double>::infinity();
        int n0 = -1;
        for (const auto& r : main.rows) {
            best = std::min(best, r.eta_sup_bound / main.a);
            if (n0 < 0 && r.eta_sup_bound < main.a / 10) n0 = r.n;
        }
        d["a"] = main.a;
        d["n0"] = n0;
        std::ostringstream csv;
        csv << "n,norm,pulled_back,eta_sup_bound\n";
        for (const auto& r : main.rows) csv << r.n << ',' << r.norm << ',' << r.pulled_back << ',' << r.eta_sup_bound << '\n';
        rec.dump("nonpreservation.csv", csv.str());
        return best;
    });
    rec.check("norms stay above a/2 from n0 on", "not preserved by U", 0.5, Comparison::AtLeast, [&](json&) {
        if (!have) throw std::runtime_error("demo unavailable");
        double m = std::numeric_limits<double>::infinity();
        bool after = false;
        for (const auto& r : main.rows) {
            after = after || r.eta_sup_bound < main.a / 10;
            if (after) m = std::min(m, r.norm / main.a);
        }
        return m;
    });
    rec.check("sup bound decreases monotonically", "not preserved by U", 0.0, Comparison::AtMost, [&](json&) {
        if (!have) throw std::runtime_error("demo unavailable");
        double m = 0.0;
        for (std::size_t i = 1; i < main.rows.size(); ++i)
            m = std::max(m, main.rows[i].eta_sup_bound - main.rows[i - 1].eta_sup_bound);
        return m;
    });
    rec.check("second symbol zero gives constant norm a", "plumbing", cfg.tolerances.quadrature, Comparison::AtMost,
              [&](json&) {
                  const auto r = nonpreservation_demo(Diffeomorphism::sinh(), gauss, {0.0, 1.0}, 10);
                  double m = 0.0;
                  for (const auto& row : r.rows) m = std::max(m, std::abs(row.norm - r.a) / r.a);
                  return m;
              });
    rec.check("identity diffeomorphism gives constant norm", "plumbing", cfg.tolerances.quadrature, Comparison::AtMost,
              [&](json& d) {
                  const auto r = nonpreservation_demo(Diffeomorphism::identity(), gauss, {0.5, 2.0}, 10);
                  double lo = r.rows[0].norm, hi = lo;
                  for (const auto& row : r.rows) {
                      lo = std::min(lo, row.norm);
                      hi = std::max(hi, row.norm);
                  }
                  d["norm"] = hi;
                  return (hi - lo) / hi;
              });
}

}  // namespace

json SuiteConfig::to_json() const {
    return {{"k_values", k_values},
            {"max_jet_order", max_jet_order},
            {"grid", {{"x_step", grid.x_step}, {"t_step", grid.t_step}, {"x_radius", grid.x_radius}, {"t_radius", grid.t_radius}}},
            {"tolerances",
             {{"equality", tolerances.equality},
              {"quadrature", tolerances.quadrature},
              {"winding_residual", tolerances.winding_residual}}},
            {"trials", trials},
            {"seed", seed}};
}

SuiteConfig parse_config(const json& j) {
    require(j.is_object(), "top level must be an object");
    static const std::vector<std::string> known{"k_values", "max_jet_order", "grid", "tolerances", "trials", "seed"};
    for (const auto& [key, _] : j.items())
        require(std::find(known.begin(), known.end(), key) != known.end(), "unknown field " + key);
    SuiteConfig c;
    c.k_values = get_field(j, "k_values", c.k_values, "");
    c.max_jet_order = get_field(j, "max_jet_order", c.max_jet_order, "");
    c.trials = get_field(j, "trials", c.trials, "");
    c.seed = get_field(j, "seed", c.seed, "");
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        require(g.is_object(), "grid must be an object");
        c.grid.x_step = get_field(g, "x_step", c.grid.x_step, "grid.");
        c.grid.t_step = get_field(g, "t_step", c.grid.t_step, "grid.");
        c.grid.x_radius = get_field(g, "x_radius", c.grid.x_radius, "grid.");
        c.grid.t_radius = get_field(g, "t_radius", c.grid.t_radius, "grid.");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        require(t.is_object(), "tolerances must be an object");
        c.tolerances.equality = get_field(t, "equality", c.tolerances.equality, "tolerances.");
        c.tolerances.quadrature = get_field(t, "quadrature", c.tolerances.quadrature, "tolerances.");
        c.tolerances.winding_residual = get_field(t, "winding_residual", c.tolerances.winding_residual, "tolerances.");
    }
    require(!c.k_values.empty(), "k_values must be nonempty");
    for (int k : c.k_values) require(k >= 1, "k_values must be positive");
    require(c.max_jet_order >= 0 && c.max_jet_order <= kMaxTaylorOrder,
            "max_jet_order must lie in 0.." + std::to_string(kMaxTaylorOrder));
    require(c.trials >= 1, "trials must be >= 1");
    require(c.grid.x_step > 0 && c.grid.t_step > 0, "grid steps must be positive");
    require(c.grid.x_radius > 0 && c.grid.t_radius > 0, "grid radii must be positive");
    require(c.tolerances.equality > 0 && c.tolerances.quadrature > 0 && c.tolerances.winding_residual > 0,
            "tolerances must be positive");
    return c;
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must have the form key=value: " + assignment);
    const std::string path = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("override has an empty key segment: " + assignment);
        if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

SuiteConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    for (const auto& o : overrides) apply_override(j, o);
    return parse_config(j);
}

bool SuiteReport::passed() const {
    return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed; });
}

json SuiteReport::to_json() const {
    json recs = json::array();
    for (const auto& r : records) {
        json o{{"name", r.name},
               {"paper_anchor", r.anchor},
               {"status", r.passed ? "pass" : "fail"},
               {"measured", r.measured},
               {"tolerance", r.tolerance},
               {"comparison", comparison_name(r.comparison)}};
        if (!r.details.empty()) o["details"] = r.details;
        recs.push_back(std::move(o));
    }
    return {{"suite", suite}, {"status", passed() ? "pass" : "fail"}, {"records", recs}, {"wall_time", wall_time}, {"config", config}};
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"verify-coeff", "verify-flow",  "verify-groupoid",     "verify-jets",
                                                "index",        "classify",     "demo-nonpreservation"};
    return names;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& config) {
    static const std::vector<std::pair<std::string, void (*)(const SuiteConfig&, Recorder&)>> table{
        {"verify-coeff", coeff_suite}, {"verify-flow", flow_suite}, {"verify-groupoid", groupoid_suite},
        {"verify-jets", jets_suite},   {"index", index_suite},      {"classify", classify_suite},
        {"demo-nonpreservation", demo_suite}};
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
    if (it == table.end()) throw std::invalid_argument("unknown suite " + name);
    SuiteReport report;
    report.suite = name;
    report.config = config.to_json();
    Recorder rec(report);
    const auto start = std::chrono::steady_clock::now();
    it->second(config, rec);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

double cocycle_residual(int k, int max_order, int pairs, std::mt19937_64& rng) {
    const auto& table = monomial_taylor_table(k, max_order);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double m = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const double t = u(rng), s = u(rng);
        for (int mm = 0; mm <= max_order; ++mm)
            for (int n = 0; n <= mm; ++n) m = std::max(m, check_cocycle_identity(table, n, mm, t, s));
    }
    return m;
}

double relation_residual(int k, int trials, std::mt19937_64& rng) {
    double m = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto f0 = random_gauss_poly(rng);
        std::vector<GaussPolyFn> c(static_cast<std::size_t>(k) + 1);
        c[0] = f0;
        const ExactJet f(k, c);
        if (k == 1) {
            const ExactJet twisted(1, {mul_by_exp(f0, 1.0), GaussPolyFn{}});
            m = std::max(m, jet_sup_norm(jet_subtract(x_mult_left(f), x_mult_right(twisted))));
        } else {
            std::vector<GaussPolyFn> want(static_cast<std::size_t>(k) + 1);
            want[static_cast<std::size_t>(k)] = mul_by_t(f0);
            const auto diff = jet_subtract(x_mult_left(f), x_mult_right(f));
            m = std::max(m, jet_sup_norm(jet_subtract(diff, ExactJet(k, want))));
        }
    }
    return m;
}

double group_law_residual(const FlowModel& model, int samples, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double m = 0.0;
    for (int i = 0; i < samples;) {
        const double x = u(rng), t = u(rng), s = u(rng);
        if (!model.admissible(x, s) || !model.admissible(x, t + s)) continue;
        const double y = flow_eval(model, x, s);
        if (!model.admissible(y, t)) continue;
        m = std::max(m, std::abs(flow_eval(model, x, t + s) - flow_eval(model, y, t)));
        ++i;
    }
    return m;
}

GroupoidKernel suite_kernel(std::mt19937_64& rng, const FlowModel& flow, const GridSpec& grid, KernelWindow window) {
    return random_kernel(rng, flow, UniformGrid::symmetric(grid.x_step, grid.x_radius),
                         UniformGrid::symmetric(grid.t_step, grid.t_radius), grid.x_radius / 4.0, grid.t_radius, window);
}

namespace {

template <class Measure>
Refinement refine(int k, const GridSpec& grid, int trials, std::uint64_t seed, Measure&& measure) {
    Refinement r;
    for (int level = 0; level < 2; ++level) {
        const GridSpec g = level ? halved(grid) : grid;
        std::mt19937_64 rng(seed);
        double m = 0.0;
        for (int i = 0; i < trials; ++i) m = std::max(m, measure(rng, FlowModel(k), g));
        (level ? r.fine : r.coarse) = m;
    }
    return r;
}

}  // namespace

Refinement associativity_error(int k, const GridSpec& grid, int trials, std::uint64_t seed) {
    return refine(k, grid, trials, seed, [](std::mt19937_64& rng, const FlowModel& flow, const GridSpec& g) {
        const auto a = suite_kernel(rng, flow, g), b = suite_kernel(rng, flow, g), c = suite_kernel(rng, flow, g);
        return relative_distance(convolve(convolve(a, b), c), convolve(a, convolve(b, c)));
    });
}

Refinement anti_multiplicativity_error(int k, const GridSpec& grid, int trials, std::uint64_t seed) {
    return refine(k, grid, trials, seed, [](std::mt19937_64& rng, const FlowModel& flow, const GridSpec& g) {
        const auto a = suite_kernel(rng, flow, g), b = suite_kernel(rng, flow, g);
        return relative_distance(adjoint(convolve(a, b)), convolve(adjoint(b), adjoint(a)));
    });
}

Refinement taylor_homomorphism_error(int k, int max_order, const GridSpec& grid, int trials, std::uint64_t seed) {
    return refine(k, grid, trials, seed, [max_order](std::mt19937_64& rng, const FlowModel& flow, const GridSpec& g) {
        const auto a = suite_kernel(rng, flow, g, KernelWindow::Plateau);
        const auto b = suite_kernel(rng, flow, g, KernelWindow::Plateau);
        const auto ab = convolve(a, b);
        double m = 0.0;
        for (int q = 0; q <= max_order; ++q)
            m = std::max(m, jet_rel_distance(taylor_map(ab, q), jet_mul(taylor_map(a, q), taylor_map(b, q))));
        return m;
    });
}

}  // namespace folab

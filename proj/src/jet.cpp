#include "folab/jet.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace folab {

using nlohmann::json;

ExactJet random_exact_jet(std::mt19937_64& rng, int k, int p) {
    std::vector<GaussPolyFn> c;
    for (int n = 0; n <= p; ++n) c.push_back(random_gauss_poly(rng));
    return {k, std::move(c)};
}

std::pair<ExactJet, ExactJet> commutator_witness(int k, int q) {
    if (q < 1) throw std::invalid_argument("commutator_witness: order must be >= 1");
    const auto unit = GaussPolyFn::gaussian(1.0, 0.0, 1.0);
    std::vector<GaussPolyFn> f(static_cast<std::size_t>(q) + 1), g(static_cast<std::size_t>(q) + 1);
    f[1] = unit;
    g[0] = unit;
    return {ExactJet(k, std::move(f)), ExactJet(k, std::move(g))};
}

std::vector<CommutativityRow> commutativity_report(int k, int max_order, int trials, std::mt19937_64& rng) {
    std::vector<CommutativityRow> rows;
    for (int q = 0; q <= max_order; ++q) {
        CommutativityRow row;
        row.order = q;
        row.expected_commutative = q <= k - 1;
        for (int i = 0; i < trials; ++i) {
            auto f = random_exact_jet(rng, k, q);
            auto g = random_exact_jet(rng, k, q);
            row.max_commutator = std::max(row.max_commutator, jet_sup_norm(commutator(f, g)));
        }
        if (q >= k) {
            auto [f, g] = commutator_witness(k, q);
            row.witness_norm = jet_sup_norm(commutator(f, g));
            row.max_commutator = std::max(row.max_commutator, row.witness_norm);
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

json to_json(const GaussPolyFn& f) {
    json atoms = json::array();
    for (const auto& a : f.atoms())
        atoms.push_back({{"poly", a.poly.coeffs()}, {"mean", a.mean}, {"variance", a.variance}});
    return {{"type", "gauss_poly"}, {"atoms", atoms}};
}

json to_json(const GridFn& f) {
    std::vector<double> re, im;
    for (auto z : f.samples()) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return {{"type", "grid"}, {"t_start", f.t_start()}, {"t_step", f.t_step()}, {"re", re}, {"im", im}};
}

GaussPolyFn gauss_from_json(const json& j) {
    if (j.at("type") != "gauss_poly") throw std::invalid_argument("expected a gauss_poly coefficient");
    std::vector<GaussAtom> atoms;
    for (const auto& a : j.at("atoms"))
        atoms.push_back({Polynomial(a.at("poly").get<std::vector<double>>()), a.at("mean").get<double>(),
                         a.at("variance").get<double>()});
    return GaussPolyFn(std::move(atoms));
}

GridFn grid_from_json(const json& j) {
    if (j.at("type") != "grid") throw std::invalid_argument("expected a grid coefficient");
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw std::invalid_argument("grid coefficient: re/im length mismatch");
    std::vector<cplx> s(re.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {re[i], im[i]};
    return {GridFn::Unchecked{}, j.at("t_start").get<double>(), j.at("t_step").get<double>(), std::move(s)};
}

template <class C>
void write_jet(std::ostream& os, const Jet<C>& f) {
    json coeffs = json::array();
    for (const auto& c : f.coeffs) coeffs.push_back(to_json(c));
    os << json{{"k", f.k}, {"p", f.order()}, {"coeffs", coeffs}}.dump(2) << '\n';
}

template <class C, class Conv>
Jet<C> read_jet(std::istream& is, Conv conv) {
    json j = json::parse(is);
    std::vector<C> c;
    for (const auto& e : j.at("coeffs")) c.push_back(conv(e));
    Jet<C> f(j.at("k").get<int>(), std::move(c));
    if (f.order() != j.at("p").get<int>()) throw std::invalid_argument("jet JSON: p disagrees with coefficient count");
    return f;
}

}  // namespace

void write_json(std::ostream& os, const ExactJet& f) { write_jet(os, f); }
void write_json(std::ostream& os, const GridJet& f) { write_jet(os, f); }
ExactJet read_exact_jet_json(std::istream& is) { return read_jet<GaussPolyFn>(is, gauss_from_json); }
GridJet read_grid_jet_json(std::istream& is) { return read_jet<GridFn>(is, grid_from_json); }

}  // namespace folab

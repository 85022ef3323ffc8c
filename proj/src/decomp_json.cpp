#include <json.hpp>

#include "stabrank/stabilizer.hpp"

namespace stabrank::stab {

using nlohmann::json;

namespace {

json cyclo_to_json(const Cyclo& c) {
  json arr = json::array();
  for (std::size_t j = 0; j < 8; ++j) {
    arr.push_back(c.coeff(j).get_str());
  }
  return arr;
}

Cyclo cyclo_from_json(const json& arr) {
  if (!arr.is_array() || arr.size() != 8) {
    throw std::invalid_argument("coefficient must be an array of 8 rationals");
  }
  Cyclo c;
  for (std::size_t j = 0; j < 8; ++j) {
    mpq_class q(arr[j].get<std::string>());
    q.canonicalize();
    c.coeff(j) = q;
  }
  return c;
}

}  // namespace

std::string decomposition_to_json_string(const StabilizerDecomposition& d, int indent) {
  json out;
  out["n"] = d.n();
  out["mode"] = d.exact_mode() ? "exact" : "float";
  json terms = json::array();
  for (const auto& term : d.terms()) {
    json t;
    if (d.exact_mode()) {
      t["c"] = cyclo_to_json(term.c);
    } else {
      t["c"] = {{"re", term.c_float.re.get_d()}, {"im", term.c_float.im.get_d()}};
    }
    t["ell"] = {{"coeffs", term.phi.ell().coeffs().to_hex()}, {"constant", 0}};
    json quad_rows = json::array();
    for (std::size_t i = 0; i < term.phi.arity(); ++i) {
      quad_rows.push_back(term.phi.quad_form().quad().row(i).to_hex());
    }
    t["q"] = {{"quad_rows", quad_rows},
              {"linear", term.phi.quad_form().linear().to_hex()},
              {"constant", term.phi.quad_form().constant() ? 1 : 0}};
    json m_rows = json::array();
    const auto& a = term.phi.support();
    for (std::size_t i = 0; i < a.codim(); ++i) {
      m_rows.push_back(a.constraints().row(i).to_hex());
    }
    t["A"] = {{"M_rows", m_rows}, {"b", a.rhs().to_hex()}};
    terms.push_back(std::move(t));
  }
  out["terms"] = std::move(terms);
  return out.dump(indent);
}

StabilizerDecomposition decomposition_from_json_string(const std::string& text) {
  json in = json::parse(text);
  std::size_t n = in.at("n").get<std::size_t>();
  std::string mode = in.at("mode").get<std::string>();
  if (mode != "exact" && mode != "float") {
    throw std::invalid_argument("decomposition mode must be 'exact' or 'float'");
  }
  bool exact = (mode == "exact");
  StabilizerDecomposition d(n, exact);
  for (const auto& t : in.at("terms")) {
    const json& ell_j = t.at("ell");
    if (ell_j.at("constant").get<int>() != 0) {
      throw std::invalid_argument("ell.constant must be 0 in stabilizer functions");
    }
    AffineForm ell(BitVector::from_hex(n, ell_j.at("coeffs").get<std::string>()), false);

    const json& q_j = t.at("q");
    const auto& quad_rows = q_j.at("quad_rows");
    if (quad_rows.size() != n) {
      throw std::invalid_argument("q.quad_rows must have n entries");
    }
    BitMatrix quad(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      quad.row(i) = BitVector::from_hex(n, quad_rows[i].get<std::string>());
    }
    QuadraticForm q(quad, BitVector::from_hex(n, q_j.at("linear").get<std::string>()),
                    q_j.at("constant").get<int>() != 0);

    const json& a_j = t.at("A");
    const auto& m_rows = a_j.at("M_rows");
    BitMatrix m(0, n);
    for (const auto& row : m_rows) {
      m.append_row(BitVector::from_hex(n, row.get<std::string>()));
    }
    if (m.rows() == 0) m = BitMatrix(0, n);
    BitVector b = BitVector::from_hex(m.rows(), a_j.at("b").get<std::string>());
    AffineSubspace support = AffineSubspace::from_constraints(m, b);

    StabilizerFunction phi(ell, q, support);
    if (exact) {
      d.add_term(cyclo_from_json(t.at("c")), std::move(phi));
    } else {
      ComplexMP c = ComplexMP::from_double(t.at("c").at("re").get<double>(),
                                           t.at("c").at("im").get<double>());
      d.add_term(c, std::move(phi));
    }
  }
  return d;
}

}  // namespace stabrank::stab

#include "posyid/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "posyid/errors.hpp"

namespace posyid {

PosynomialModel::PosynomialModel(Index num_variables, std::vector<MonomialTerm> terms)
    : num_variables_(num_variables) {
  if (num_variables_ < 1) throw DataError("posynomial model needs at least one variable");
  std::set<std::vector<double>> seen;
  terms_.reserve(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    auto& term = terms[t];
    if (static_cast<Index>(term.exponents.size()) != num_variables_) {
      std::ostringstream msg;
      msg << "term " << t << " has " << term.exponents.size() << " exponents, expected "
          << num_variables_;
      throw DataError(msg.str());
    }
    if (!std::isfinite(term.coefficient) || term.coefficient < 0.0) {
      std::ostringstream msg;
      msg << "term " << t << " has coefficient " << term.coefficient
          << "; posynomial coefficients must be finite and nonnegative";
      throw IntegrityError(msg.str());
    }
    for (double a : term.exponents) {
      if (!std::isfinite(a)) throw IntegrityError("posynomial exponents must be finite");
    }
    if (!seen.insert(term.exponents).second) {
      std::ostringstream msg;
      msg << "term " << t << " repeats an exponent vector";
      throw IntegrityError(msg.str());
    }
    if (term.coefficient > 0.0) terms_.push_back(std::move(term));
  }
}

PosynomialModel from_solution(const MonomialBasis& basis, const Eigen::VectorXd& x,
                              double threshold) {
  if (x.size() != basis.size()) {
    std::ostringstream msg;
    msg << "solution has " << x.size() << " entries but the basis has " << basis.size();
    throw DataError(msg.str());
  }
  std::vector<MonomialTerm> terms;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < -threshold) {
      std::ostringstream msg;
      msg << "coefficient " << i << " = " << x[i] << " is negative";
      throw IntegrityError(msg.str());
    }
    if (x[i] > threshold) {
      const auto alpha = basis.exponent(i);
      terms.push_back({x[i], std::vector<double>(alpha.begin(), alpha.end())});
    }
  }
  return PosynomialModel(basis.num_variables(), std::move(terms));
}

double predict(const PosynomialModel& model, std::span<const double> w) {
  if (static_cast<Index>(w.size()) != model.num_variables()) {
    throw DataError("predict: input dimension does not match the model");
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(w[j] > 0.0)) {
      std::ostringstream msg;
      msg << "predict: w_" << j + 1 << " = " << w[j] << " is not strictly positive";
      throw DomainError(msg.str());
    }
  }
  double sum = 0.0;
  for (const auto& term : model.terms()) {
    sum += term.coefficient * eval_monomial(term.exponents, w);
  }
  return sum;
}

Eigen::VectorXd predict(const PosynomialModel& model, const Dataset& data) {
  Eigen::VectorXd out(data.size());
  for (Index k = 0; k < data.size(); ++k) out[k] = predict(model, data.sample(k));
  return out;
}

double relative_error(const DesignMatrix& design, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y) {
  if (x.size() != design.cols() || y.size() != design.rows()) {
    throw DataError("relative_error: dimension mismatch");
  }
  const double ynorm = y.norm();
  if (ynorm == 0.0) throw DataError("relative error is undefined for y = 0");
  return (design.columns() * x - y).norm() / ynorm;
}

double relative_error(const PosynomialModel& model, const Dataset& data) {
  const double ynorm = data.responses().norm();
  if (ynorm == 0.0) throw DataError("relative error is undefined for y = 0");
  return (predict(model, data) - data.responses()).norm() / ynorm;
}

nlohmann::json to_json(const PosynomialModel& model) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& term : model.terms()) {
    terms.push_back({{"coef", term.coefficient}, {"exponents", term.exponents}});
  }
  return {{"n_w", model.num_variables()}, {"terms", std::move(terms)}};
}

PosynomialModel model_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw DataError("model document must be a JSON object");
    const auto n_w = doc.at("n_w").get<Index>();
    std::vector<MonomialTerm> terms;
    for (const auto& t : doc.at("terms")) {
      terms.push_back({t.at("coef").get<double>(), t.at("exponents").get<std::vector<double>>()});
    }
    return PosynomialModel(n_w, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

std::string serialize(const PosynomialModel& model) { return to_json(model).dump(2); }

PosynomialModel deserialize(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model document is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model(const PosynomialModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << serialize(model) << '\n';
}

PosynomialModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

}  // namespace posyid

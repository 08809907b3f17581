#include "adialab/model_file.hpp"

#include "adialab/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace adialab {

namespace {

void require_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) throw ValidationError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

const YAML::Node required(const YAML::Node& node, const std::string& key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw ValidationError(where + ": missing key '" + key + "'");
  return v;
}

Complex parse_entry(const YAML::Node& e) {
  if (e.IsScalar()) return {e.as<double>(), 0.0};
  if (e.IsSequence() && e.size() == 2) return {e[0].as<double>(), e[1].as<double>()};
  throw ValidationError("matrix entry must be a real or an [re, im] pair");
}

std::vector<Site> parse_support(const YAML::Node& node, int dimension) {
  if (!node.IsSequence() || node.size() == 0) throw ValidationError("support must be a non-empty list");
  std::vector<Site> sites;
  for (const auto& s : node) {
    Site site;
    if (s.IsScalar()) {
      site.x = s.as<int>();
    } else if (s.IsSequence() && static_cast<int>(s.size()) == dimension) {
      site.x = s[0].as<int>();
      if (dimension > 1) site.y = s[1].as<int>();
      if (dimension > 2) site.z = s[2].as<int>();
    } else {
      throw ValidationError("support site must be an integer or a coordinate list of length " +
                            std::to_string(dimension));
    }
    sites.push_back(site);
  }
  return sites;
}

LocalTerm parse_term(const YAML::Node& node, int dimension) {
  require_keys(node, {"support", "pauli", "coefficient", "matrix"}, "term");
  auto support = parse_support(required(node, "support", "term"), dimension);
  const bool has_pauli = static_cast<bool>(node["pauli"]);
  const bool has_matrix = static_cast<bool>(node["matrix"]);
  if (has_pauli == has_matrix) throw ValidationError("term: give exactly one of 'pauli' or 'matrix'");
  const double coefficient = node["coefficient"] ? node["coefficient"].as<double>() : 1.0;
  Matrix m;
  if (has_pauli) {
    const auto word = node["pauli"].as<std::string>();
    if (word.size() != support.size()) throw ValidationError("term: pauli word length must match the support");
    m = pauli::from_string(word);
  } else {
    m = parse_matrix(node["matrix"]);
  }
  return LocalTerm(std::move(support), coefficient * m);
}

YAML::Node load_document(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw ValidationError("file not found: " + file.string());
  try {
    return YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

void expect_kind(const YAML::Node& doc, const std::string& kind, const std::filesystem::path& file) {
  const auto k = required(doc, "kind", file.string()).as<std::string>();
  if (k != kind) throw ValidationError(file.string() + ": expected kind '" + kind + "', found '" + k + "'");
}

std::vector<double> parse_reals(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) throw ValidationError(what + " must be a non-empty list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(v.as<double>());
  return out;
}

template <typename F>
auto wrap_yaml(const std::filesystem::path& file, F&& f) {
  try {
    return f();
  } catch (const YAML::Exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

}  // namespace

Matrix parse_matrix(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() == 0) throw ValidationError("matrix must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(node.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) throw ValidationError("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = parse_entry(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

Interaction parse_interaction(const YAML::Node& node, double weight_r, int dimension) {
  require_keys(node, {"terms"}, "interaction");
  const auto terms_node = required(node, "terms", "interaction");
  if (!terms_node.IsSequence()) throw ValidationError("interaction: 'terms' must be a list");
  std::vector<LocalTerm> terms;
  for (const auto& t : terms_node) terms.push_back(parse_term(t, dimension));
  return Interaction(std::move(terms), weight_r, dimension);
}

Interaction load_interaction(const std::filesystem::path& file) {
  const auto doc = load_document(file);
  return wrap_yaml(file, [&] {
    require_keys(doc, {"kind", "name", "weight_r", "dimension", "terms"}, file.string());
    expect_kind(doc, "interaction", file);
    const double r = doc["weight_r"] ? doc["weight_r"].as<double>() : 1.0;
    const int d = doc["dimension"] ? doc["dimension"].as<int>() : 1;
    YAML::Node body;
    body["terms"] = required(doc, "terms", file.string());
    return parse_interaction(body, r, d);
  });
}

InteractionPath load_path(const std::filesystem::path& file) {
  const auto doc = load_document(file);
  return wrap_yaml(file, [&] {
    require_keys(doc, {"kind", "name", "weight_r", "dimension", "form", "phi", "phi0", "phi1", "lambda", "knots",
                       "samples"},
                 file.string());
    expect_kind(doc, "path", file);
    const double r = doc["weight_r"] ? doc["weight_r"].as<double>() : 1.0;
    const int d = doc["dimension"] ? doc["dimension"].as<int>() : 1;
    const auto form = required(doc, "form", file.string()).as<std::string>();
    auto only = [&](const std::set<std::string>& keys) {
      for (const char* k : {"phi", "phi0", "phi1", "lambda", "knots", "samples"}) {
        if (doc[k] && !keys.contains(k)) throw ValidationError(file.string() + ": key '" + k + "' not used by form " + form);
      }
    };
    if (form == "constant") {
      only({"phi"});
      return InteractionPath::constant(parse_interaction(required(doc, "phi", file.string()), r, d));
    }
    if (form == "linear") {
      only({"phi0", "phi1", "lambda"});
      auto lambda = doc["lambda"] ? parse_reals(doc["lambda"], "lambda") : std::vector<double>{0.0, 1.0};
      return InteractionPath::interpolation(parse_interaction(required(doc, "phi0", file.string()), r, d),
                                            parse_interaction(required(doc, "phi1", file.string()), r, d),
                                            std::move(lambda));
    }
    if (form == "samples") {
      only({"knots", "samples"});
      auto knots = parse_reals(required(doc, "knots", file.string()), "knots");
      const auto samples_node = required(doc, "samples", file.string());
      if (!samples_node.IsSequence()) throw ValidationError(file.string() + ": 'samples' must be a list");
      std::vector<Interaction> samples;
      for (const auto& s : samples_node) samples.push_back(parse_interaction(s, r, d));
      return InteractionPath::sampled(std::move(knots), std::move(samples));
    }
    throw ValidationError(file.string() + ": unknown path form '" + form + "'");
  });
}

MatrixModel load_matrix_model(const std::filesystem::path& file) {
  const auto doc = load_document(file);
  return wrap_yaml(file, [&] {
    require_keys(doc, {"kind", "name", "base", "perturbation", "beta", "band"}, file.string());
    expect_kind(doc, "matrix-model", file);
    MatrixModel m;
    m.name = doc["name"] ? doc["name"].as<std::string>() : file.stem().string();
    m.base = parse_matrix(required(doc, "base", file.string()));
    const auto pert = required(doc, "perturbation", file.string());
    if (!pert.IsSequence() || pert.size() == 0)
      throw ValidationError(file.string() + ": 'perturbation' must list polynomial coefficient matrices");
    std::vector<Matrix> coeffs;
    for (const auto& c : pert) {
      coeffs.push_back(parse_matrix(c));
      if (coeffs.back().rows() != m.base.rows())
        throw ValidationError(file.string() + ": perturbation dimension differs from base");
    }
    m.perturbation = [coeffs](double tau) {
      Matrix v = Matrix::Zero(coeffs[0].rows(), coeffs[0].cols());
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = (tau * v + *it).eval();
      return v;
    };
    m.perturbation_derivative = [coeffs](double tau) {
      Matrix v = Matrix::Zero(coeffs[0].rows(), coeffs[0].cols());
      for (std::size_t k = coeffs.size(); k-- > 1;) v = (tau * v + static_cast<double>(k) * coeffs[k]).eval();
      return v;
    };
    if (doc["beta"]) m.beta = doc["beta"].as<double>();
    if (doc["band"]) {
      require_keys(doc["band"], {"first", "count"}, "band");
      m.band.first = doc["band"]["first"] ? doc["band"]["first"].as<int>() : 0;
      m.band.count = doc["band"]["count"] ? doc["band"]["count"].as<int>() : 1;
    }
    if (!is_hermitian(m.base)) throw ValidationError(file.string() + ": base is not self-adjoint");
    m.validate();
    return m;
  });
}

std::string file_hash(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + file.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace adialab

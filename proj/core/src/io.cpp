#include "qtomo/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qtomo {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid ") + what + " JSON: " + e.what());
  }
}

std::complex<double> entry(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

json entry_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

CMatrix matrix_from(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  CMatrix m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
      throw ValidationError("matrix must be square");
    for (Eigen::Index k = 0; k < rows; ++k) m(i, k) = entry(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(entry_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

PovmFamily parse_family(const std::string& name) {
  if (name == "sic") return PovmFamily::sic;
  if (name == "mub") return PovmFamily::mub;
  if (name == "platonic") return PovmFamily::platonic;
  if (name == "covariant") return PovmFamily::covariant;
  return PovmFamily::custom;
}

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string povm_to_json(const Povm& povm) {
  json j;
  j["dim"] = povm.dim();
  j["label"] = povm.label();
  j["family"] = std::string(to_string(povm.family()));
  json outcomes = json::array();
  for (const auto& o : povm.outcomes()) outcomes.push_back(matrix_json(o));
  j["outcomes"] = std::move(outcomes);
  return j.dump(1) + "\n";
}

Povm povm_from_json(std::string_view text) {
  const json j = parse(text, "POVM");
  if (!j.is_object() || !j.contains("outcomes"))
    throw ValidationError("POVM JSON needs an \"outcomes\" array");
  const auto& arr = j["outcomes"];
  if (!arr.is_array() || arr.empty()) throw ValidationError("POVM has no outcomes");
  std::vector<CMatrix> outcomes;
  outcomes.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    try {
      outcomes.push_back(matrix_from(arr[k]));
    } catch (const ValidationError& e) {
      throw ValidationError("outcome " + std::to_string(k) + ": " + e.what());
    }
  }
  if (j.contains("dim")) {
    const int dim = j["dim"].get<int>();
    for (std::size_t k = 0; k < outcomes.size(); ++k)
      if (outcomes[k].rows() != dim)
        throw ValidationError("outcome " + std::to_string(k) + " is not " + std::to_string(dim) +
                              "x" + std::to_string(dim));
  }
  const std::string label = j.value("label", std::string("custom"));
  const PovmFamily family = parse_family(j.value("family", std::string("custom")));
  return Povm(std::move(outcomes), family, label);
}

Povm read_povm(const std::filesystem::path& path) { return povm_from_json(read_text_file(path)); }

void write_povm(const Povm& povm, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << povm_to_json(povm);
}

Povm resolve_povm(std::string_view spec) {
  if (spec.rfind("builtin:", 0) == 0) return builtin_povm(spec.substr(8));
  return read_povm(std::filesystem::path(std::string(spec)));
}

CVector fiducial_from_json(std::string_view text) {
  const json j = parse(text, "fiducial");
  if (!j.is_array() || j.empty()) throw ValidationError("fiducial must be a nonempty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = entry(j[i]);
  return v;
}

CVector read_fiducial(const std::filesystem::path& path) {
  return fiducial_from_json(read_text_file(path));
}

CMatrix matrix_from_json(std::string_view text) { return matrix_from(parse(text, "matrix")); }

std::string matrix_to_json(const CMatrix& m) { return matrix_json(m).dump(); }

CMatrix read_state(const std::filesystem::path& path) {
  return matrix_from_json(read_text_file(path));
}

std::vector<std::uint64_t> counts_from_text(std::string_view text) {
  std::vector<std::uint64_t> counts;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '[') {
    const json j = parse(text, "counts");
    for (const auto& v : j) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError("counts must be nonnegative integers");
      counts.push_back(v.get<std::uint64_t>());
    }
    return counts;
  }
  std::string cleaned(text);
  for (char& ch : cleaned)
    if (ch == ',') ch = ' ';
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (tok.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw ValidationError("invalid count '" + tok + "'");
    }
    if (used != tok.size()) throw ValidationError("invalid count '" + tok + "'");
    counts.push_back(v);
  }
  if (counts.empty()) throw ValidationError("no counts found");
  return counts;
}

std::vector<std::uint64_t> read_counts(const std::filesystem::path& path) {
  return counts_from_text(read_text_file(path));
}

ExperimentConfig experiment_config_from_json(std::string_view text,
                                             const std::filesystem::path& base_dir) {
  const json j = parse(text, "config");
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const char* known[] = {"povm", "state", "estimators", "n_grid", "reps", "seed",
                                "figures", "pairwise", "threads", "output", "zero_policy",
                                "mle_max_iter", "mle_tol"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ValidationError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("povm")) {
      const auto p = j["povm"].get<std::string>();
      c.povm = p.rfind("builtin:", 0) == 0 ? p : resolve_path(p, base_dir).string();
    }
    if (j.contains("state")) {
      const auto& s = j["state"];
      if (s.contains("bloch")) {
        const auto v = s["bloch"].get<std::vector<double>>();
        if (v.size() != 3) throw ValidationError("bloch needs three components");
        c.state = StateSpec::from_bloch({v[0], v[1], v[2]});
      } else if (s.contains("family")) {
        const auto& f = s["family"];
        c.state = StateSpec::from_family(f.at("d").get<int>(), f.at("r").get<int>(), f.at("s").get<double>());
      } else if (s.contains("matrix")) {
        c.state = StateSpec::from_matrix(matrix_from(s["matrix"]));
      } else if (s.contains("file")) {
        c.state = StateSpec::from_matrix(read_state(resolve_path(s["file"].get<std::string>(), base_dir)));
      } else {
        throw ValidationError("state needs one of bloch, family, matrix, file");
      }
    }
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& e : j["estimators"]) c.estimators.push_back(parse_estimator(e.get<std::string>()));
    }
    if (j.contains("n_grid")) {
      c.n_grid.clear();
      for (const auto& n : j["n_grid"]) {
        if (!n.is_number_integer() || n.get<long long>() < 1)
          throw ValidationError("n_grid entries must be positive integers");
        c.n_grid.push_back(n.get<std::uint64_t>());
      }
    }
    if (j.contains("reps")) c.reps = j["reps"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("figures")) c.figures = j["figures"].get<std::vector<std::string>>();
    if (j.contains("pairwise")) c.pairwise = j["pairwise"].get<bool>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("output")) c.output = resolve_path(j["output"].get<std::string>(), base_dir).string();
    if (j.contains("zero_policy")) {
      const auto z = j["zero_policy"].get<std::string>();
      if (z == "regularize") c.zero_policy = ZeroFrequencyPolicy::regularize;
      else if (z == "error") c.zero_policy = ZeroFrequencyPolicy::error;
      else throw ValidationError("zero_policy must be regularize or error");
    }
    if (j.contains("mle_max_iter")) c.mle.max_iter = j["mle_max_iter"].get<int>();
    if (j.contains("mle_tol")) c.mle.tol = j["mle_tol"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  return experiment_config_from_json(read_text_file(path), path.parent_path());
}

}  // namespace qtomo

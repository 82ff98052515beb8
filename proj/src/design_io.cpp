#include "cmplq/design_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace cmplq {

using nlohmann::json;

namespace {

constexpr const char* kRequiredFields[] = {"dim",      "k", "source", "seed",     "stream_id",    "iterations",
                                           "restarts", "V", "t",      "codebook", "mse_estimate", "mse_std_error",
                                           "mse_points"};

const json& field(const json& j, const std::string& name) {
  if (!j.is_object()) throw DesignFormatError("design: expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw DesignFormatError("design: missing field '" + name + "'");
  return *it;
}

std::uint64_t unsigned_field(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_number_unsigned()) throw DesignFormatError("design: field '" + name + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

double number_field(const json& j, const std::string& name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw DesignFormatError("design: field '" + name + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& name, std::size_t expected) {
  if (!v.is_array()) throw DesignFormatError("design: field '" + name + "' must be an array");
  if (v.size() != expected)
    throw DesignFormatError("design: field '" + name + "' has " + std::to_string(v.size()) + " entries, expected " +
                            std::to_string(expected));
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& x : v) {
    if (!x.is_number()) throw DesignFormatError("design: field '" + name + "' must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// For text that fails to parse, the first required top-level field whose
// value was not read to completion. Empty if every field made it through.
std::string first_incomplete_field(const std::string& text) {
  std::set<std::string> complete;
  std::string current;
  json::parser_callback_t track = [&](int depth, json::parse_event_t event, json& parsed) {
    if (depth != 1) return true;
    if (event == json::parse_event_t::key) {
      current = parsed.get<std::string>();
    } else if (event == json::parse_event_t::value || event == json::parse_event_t::object_end ||
               event == json::parse_event_t::array_end) {
      complete.insert(current);
    }
    return true;
  };
  [[maybe_unused]] const json partial = json::parse(text, track, false);
  for (const char* name : kRequiredFields)
    if (!complete.contains(name)) return name;
  return {};
}

}  // namespace

json design_to_json(const QuantizerDesign& design) {
  const auto& cfg = design.config();
  json codebook = json::array();
  for (const auto& e : design.codebook().entries())
    codebook.push_back({{"label", e.label.signs()}, {"centroid", e.centroid}, {"weight", e.weight}});
  const auto& p = design.provenance();
  return json{{"dim", cfg.dim()},
              {"k", cfg.size()},
              {"source", std::string(to_string(design.source().kind()))},
              {"seed", p.seed},
              {"stream_id", p.stream_id},
              {"iterations", p.iterations},
              {"restarts", p.restarts},
              {"V", cfg.weights()},
              {"t", cfg.offsets()},
              {"codebook", std::move(codebook)},
              {"mse_estimate", design.mse().value},
              {"mse_std_error", design.mse().std_error},
              {"mse_points", design.mse().n_points}};
}

QuantizerDesign design_from_json(const json& j) {
  const std::size_t dim = unsigned_field(j, "dim");
  const std::size_t k = unsigned_field(j, "k");
  if (dim == 0) throw DesignFormatError("design: field 'dim' must be >= 1");
  if (k > kMaxComparators) throw DesignFormatError("design: field 'k' exceeds " + std::to_string(kMaxComparators));
  const json& source_name = field(j, "source");
  if (!source_name.is_string()) throw DesignFormatError("design: field 'source' must be a string");
  SourceKind kind;
  try {
    kind = parse_source_kind(source_name.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw DesignFormatError(std::string("design: field 'source': ") + e.what());
  }

  const auto weights = numbers(field(j, "V"), "V", k * dim);
  const auto offsets = numbers(field(j, "t"), "t", k);
  std::vector<Hyperplane> planes;
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<double> normal(weights.begin() + r * dim, weights.begin() + (r + 1) * dim);
    double norm2 = 0.0;
    for (double x : normal) norm2 += x * x;
    if (std::abs(std::sqrt(norm2) - 1.0) > kUnitNormTolerance)
      throw DesignFormatError("design: row " + std::to_string(r) + " of field 'V' is not unit-norm");
    planes.emplace_back(std::move(normal), offsets[r]);
  }
  CombinerConfig config(dim, planes);

  const json& cb = field(j, "codebook");
  if (!cb.is_array()) throw DesignFormatError("design: field 'codebook' must be an array");
  std::vector<CodebookEntry> entries;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const std::string where = "codebook[" + std::to_string(i) + "].";
    const json& label_json = field(cb[i], "label");
    if (!label_json.is_array() || label_json.size() != k)
      throw DesignFormatError("design: field '" + where + "label' must have " + std::to_string(k) + " entries, found " +
                              std::to_string(label_json.is_array() ? label_json.size() : 0));
    std::vector<int> signs;
    for (const auto& s : label_json) {
      if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
        throw DesignFormatError("design: field '" + where + "label' must contain only -1 or +1");
      signs.push_back(s.get<int>());
    }
    entries.push_back({RegionLabel(signs), numbers(field(cb[i], "centroid"), where + "centroid", dim),
                       number_field(cb[i], "weight")});
  }

  const SourceModel source(kind, dim);
  MseEstimate mse{number_field(j, "mse_estimate"), number_field(j, "mse_std_error"),
                  static_cast<std::size_t>(unsigned_field(j, "mse_points"))};
  Provenance provenance{unsigned_field(j, "seed"), unsigned_field(j, "stream_id"),
                        static_cast<std::size_t>(unsigned_field(j, "iterations")),
                        static_cast<std::size_t>(unsigned_field(j, "restarts"))};
  try {
    Codebook codebook(dim, k, std::move(entries), source.mean_vector());
    return QuantizerDesign(std::move(config), std::move(codebook), source, mse, provenance);
  } catch (const std::invalid_argument& e) {
    throw DesignFormatError(std::string("design: ") + e.what());
  }
}

void save_design(const QuantizerDesign& design, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write design file " + path.string());
  out << design_to_json(design).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing design file " + path.string());
}

QuantizerDesign load_design(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open design file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string missing = first_incomplete_field(text);
    throw DesignFormatError(path.string() + ": parse error" +
                            (missing.empty() ? std::string() : ", missing field '" + missing + "'") + ": " + e.what());
  }
  try {
    return design_from_json(j);
  } catch (const DesignFormatError& e) {
    throw DesignFormatError(path.string() + ": " + e.what());
  }
}

}  // namespace cmplq

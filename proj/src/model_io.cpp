#include "sfl/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sfl {

using nlohmann::json;

namespace {

std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Rat parse_rat(const json& j, const char* what) {
  try {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
    if (j.is_number_float()) return rat_from_double(j.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("bad rational in ") + what + ": " + e.what());
  }
  throw ModelFormatError(std::string("expected rational (\"p/q\") in ") + what);
}

Quadratic parse_quadratic(const json& j, long disc, const char* what) {
  if (j.is_object()) {
    Rat a = j.contains("a") ? parse_rat(j.at("a"), what) : Rat(0);
    Rat b = j.contains("b") ? parse_rat(j.at("b"), what) : Rat(0);
    return Quadratic(a, b, b == 0 ? 1 : disc);
  }
  return Quadratic(parse_rat(j, what));
}

QuadMatrix parse_quad_matrix(const json& j, long disc, int want_cols, const char* what) {
  if (!j.is_array()) throw ModelFormatError(std::string(what) + " must be an array of rows");
  QuadMatrix m;
  m.rows = int(j.size());
  m.cols = m.rows > 0 ? int(j.at(0).size()) : want_cols;
  m.e.resize(size_t(m.rows) * m.cols);
  for (int i = 0; i < m.rows; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || int(row.size()) != m.cols)
      throw ModelFormatError(std::string(what) + " rows must all have the same length");
    for (int c = 0; c < m.cols; ++c) m.at(i, c) = parse_quadratic(row.at(c), disc, what);
  }
  return m;
}

RatMatrix parse_rat_matrix(const json& j, int want_cols, const char* what) {
  if (!j.is_array()) throw ModelFormatError(std::string(what) + " must be an array of rows");
  RatMatrix m;
  m.rows = int(j.size());
  m.cols = m.rows > 0 ? int(j.at(0).size()) : want_cols;
  m.e.resize(size_t(m.rows) * m.cols);
  for (int i = 0; i < m.rows; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || int(row.size()) != m.cols)
      throw ModelFormatError(std::string(what) + " rows must all have the same length");
    for (int c = 0; c < m.cols; ++c) m.at(i, c) = parse_rat(row.at(c), what);
  }
  return m;
}

json quadratic_to_json(const Quadratic& q) {
  json j;
  j["a"] = rat_to_string(q.rational_part());
  j["b"] = rat_to_string(q.surd_part());
  return j;
}

}  // namespace

void FieldModel::validate() const {
  spec.validate();
  if (alpha != 0.0 && !(alpha > 0.0 && alpha < 2.0))
    throw ModelFormatError("alpha must lie in (0, 2)");
  for (const KernelBox& b : kernel) {
    if (int(b.lo.size()) != spec.k() || int(b.hi.size()) != spec.k())
      throw ModelFormatError("kernel box dimension must match the translation dimension k");
    for (size_t i = 0; i < b.lo.size(); ++i)
      if (!(b.lo[i] < b.hi[i]))
        throw ModelFormatError("kernel box must have positive volume");
    if (b.weight == 0.0) throw ModelFormatError("kernel box weight must be nonzero");
  }
}

FieldModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
    throw ModelFormatError(os.str());
  }

  FieldModel m;
  try {
    m.spec.d = j.at("d").get<int>();
    m.spec.disc = j.value("D", 1L);
    m.spec.gamma0 = j.contains("gamma0")
                        ? parse_quad_matrix(j.at("gamma0"), m.spec.disc, m.spec.d, "gamma0")
                        : QuadMatrix::identity(m.spec.d);
    m.spec.translation = j.contains("translation")
                             ? parse_quad_matrix(j.at("translation"), m.spec.disc, m.spec.d, "translation")
                             : QuadMatrix(0, m.spec.d);
    m.spec.rotation = j.contains("rotation")
                          ? parse_rat_matrix(j.at("rotation"), m.spec.d, "rotation")
                          : RatMatrix(0, m.spec.d);
    if (j.contains("alpha")) m.alpha = j.at("alpha").get<double>();
    if (j.contains("kernel")) {
      for (const json& jb : j.at("kernel")) {
        KernelBox box;
        box.weight = jb.value("w", 1.0);
        for (const json& x : jb.at("a")) box.lo.push_back(parse_rat(x, "kernel box"));
        for (const json& x : jb.at("b")) box.hi.push_back(parse_rat(x, "kernel box"));
        m.kernel.push_back(std::move(box));
      }
    }
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("model document: ") + e.what());
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(e.what());
  }
  m.digest = content_digest(text);
  return m;
}

FieldModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string model_to_json(const FieldModel& m) {
  json j;
  j["d"] = m.spec.d;
  j["D"] = m.spec.disc;
  json g = json::array();
  for (int i = 0; i < m.spec.gamma0.rows; ++i) {
    json row = json::array();
    for (int c = 0; c < m.spec.gamma0.cols; ++c) row.push_back(quadratic_to_json(m.spec.gamma0.at(i, c)));
    g.push_back(row);
  }
  j["gamma0"] = g;
  json t = json::array();
  for (int i = 0; i < m.spec.translation.rows; ++i) {
    json row = json::array();
    for (int c = 0; c < m.spec.translation.cols; ++c)
      row.push_back(quadratic_to_json(m.spec.translation.at(i, c)));
    t.push_back(row);
  }
  j["translation"] = t;
  json r = json::array();
  for (int i = 0; i < m.spec.rotation.rows; ++i) {
    json row = json::array();
    for (int c = 0; c < m.spec.rotation.cols; ++c)
      row.push_back(rat_to_string(m.spec.rotation.at(i, c)));
    r.push_back(row);
  }
  j["rotation"] = r;
  if (m.alpha > 0.0) j["alpha"] = m.alpha;
  if (!m.kernel.empty()) {
    json ks = json::array();
    for (const KernelBox& b : m.kernel) {
      json jb;
      jb["w"] = b.weight;
      json lo = json::array(), hi = json::array();
      for (const Rat& x : b.lo) lo.push_back(rat_to_string(x));
      for (const Rat& x : b.hi) hi.push_back(rat_to_string(x));
      jb["a"] = lo;
      jb["b"] = hi;
      ks.push_back(jb);
    }
    j["kernel"] = ks;
  }
  return j.dump(2);
}

std::string content_digest(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace sfl

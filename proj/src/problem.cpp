#include "riccati_geom/problem.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_integer(std::string_view s, long long& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double parse_decimal(const std::string& s) {
  if (s.empty()) throw InputError("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw InputError("not a number: \"" + s + "\"");
  return v;
}

double entry(const json& v, const std::string& where) {
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    try {
      out = parse_scalar(v.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  } else {
    throw InputError(where + ": expected a number or a numeric string");
  }
  if (!std::isfinite(out)) throw InputError(where + ": entry is not finite");
  return out;
}

Matrix matrix(const json& v, const std::string& where, Index rows, Index cols) {
  if (!v.is_array()) throw InputError(where + ": expected an array of rows");
  if (static_cast<Index>(v.size()) != rows) {
    std::ostringstream os;
    os << where << ": expected " << rows << " rows, got " << v.size();
    throw InputError(os.str());
  }
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw InputError(rw + ": expected an array");
    if (static_cast<Index>(row.size()) != cols) {
      std::ostringstream os;
      os << rw << ": expected " << cols << " columns, got " << row.size();
      throw InputError(os.str());
    }
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = entry(row[static_cast<std::size_t>(j)], rw + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

Index count(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  const json& v = doc[key];
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(std::string("field \"") + key + "\" must be a non-negative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return doc[key];
}

Complex complex_entry(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_string()) {
    try {
      return parse_complex(v.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (v.is_array() && v.size() == 2) return {entry(v[0], where + "[0]"), entry(v[1], where + "[1]")};
  throw InputError(where + ": expected a number, a string \"a+bi\" or a pair [re, im]");
}

}  // namespace

double parse_scalar(std::string_view raw) {
  const std::string s = trim(raw);
  const std::size_t slash = s.find('/');
  if (slash == std::string::npos) return parse_decimal(s);
  const std::string num = trim(std::string_view(s).substr(0, slash));
  const std::string den = trim(std::string_view(s).substr(slash + 1));
  long long p = 0;
  long long q = 0;
  if (!parse_integer(num, p) || !parse_integer(den, q)) {
    throw InputError("rational \"" + s + "\" must have integer numerator and denominator");
  }
  if (q == 0) throw InputError("rational \"" + s + "\" has a zero denominator");
  return static_cast<double>(p) / static_cast<double>(q);
}

Complex parse_complex(std::string_view raw) {
  std::string s;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw InputError("empty complex number");
  const char last = s.back();
  if (last != 'i' && last != 'j') return {parse_scalar(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading one.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_scalar(t);
  };
  if (split == std::string::npos) return {0.0, imag_part(s)};
  return {parse_scalar(s.substr(0, split)), imag_part(s.substr(split))};
}

Spectrum parse_spectrum_list(std::string_view csv) {
  std::vector<Complex> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string_view item = csv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!trim(item).empty()) out.push_back(parse_complex(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Spectrum(out);
}

Vector parse_vector_list(std::string_view csv) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string_view item = csv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!trim(item).empty()) out.push_back(parse_scalar(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  Vector v(static_cast<Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) v(static_cast<Index>(i)) = out[i];
  return v;
}

ProblemFile parse_problem(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ": parse error at byte " << e.byte << ": " << e.what();
    throw InputError(os.str());
  }
  try {
    if (!doc.is_object()) throw InputError("top level must be an object");
    ProblemFile p;
    p.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : source;
    const Index n = count(doc, "n");
    const Index m = count(doc, "m");
    p.sigma.A = matrix(field(doc, "A"), "A", n, n);
    p.sigma.B = matrix(field(doc, "B"), "B", n, m);
    p.sigma.Q = matrix(field(doc, "Q"), "Q", n, n);
    p.sigma.S = matrix(field(doc, "S"), "S", n, m);
    p.sigma.R = matrix(field(doc, "R"), "R", m, m);
    if (doc.contains("candidates")) {
      const json& cs = doc["candidates"];
      if (!cs.is_array()) throw InputError("candidates: expected an array");
      for (std::size_t k = 0; k < cs.size(); ++k) {
        const std::string where = "candidates[" + std::to_string(k) + "]";
        const json& c = cs[k];
        if (!c.is_object() || !c.contains("X")) throw InputError(where + ": expected an object with field \"X\"");
        Candidate cand;
        cand.label = c.contains("label") && c["label"].is_string() ? c["label"].get<std::string>()
                                                                  : "X" + std::to_string(k);
        for (const Candidate& other : p.candidates) {
          if (other.label == cand.label) throw InputError(where + ": duplicate label \"" + cand.label + "\"");
        }
        cand.X = matrix(c["X"], where + ".X", n, n);
        p.candidates.push_back(std::move(cand));
      }
    }
    if (doc.contains("x0")) {
      const json& xs = doc["x0"];
      if (!xs.is_array()) throw InputError("x0: expected an array of vectors");
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const std::string where = "x0[" + std::to_string(k) + "]";
        if (!xs[k].is_array() || static_cast<Index>(xs[k].size()) != n) {
          throw InputError(where + ": expected a vector of length " + std::to_string(n));
        }
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = entry(xs[k][static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
        p.x0.push_back(v);
      }
    }
    if (doc.contains("targets")) {
      const json& ts = doc["targets"];
      if (!ts.is_array()) throw InputError("targets: expected an array");
      std::vector<Complex> v;
      for (std::size_t k = 0; k < ts.size(); ++k) v.push_back(complex_entry(ts[k], "targets[" + std::to_string(k) + "]"));
      p.targets = Spectrum(v);
    }
    if (doc.contains("tol")) {
      const double t = entry(doc["tol"], "tol");
      if (!(t > 0.0)) throw InputError("tol must be positive");
      p.tol = t;
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) throw InputError("seed must be a non-negative integer");
      p.seed = doc["seed"].get<std::uint64_t>();
    }
    return p;
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

const Candidate& find_candidate(const ProblemFile& problem, const std::optional<std::string>& label) {
  if (problem.candidates.empty()) throw InputError("problem \"" + problem.name + "\" has no candidate solutions");
  if (!label) return problem.candidates.front();
  for (const Candidate& c : problem.candidates) {
    if (c.label == *label) return c;
  }
  std::string known;
  for (const Candidate& c : problem.candidates) known += (known.empty() ? "" : ", ") + c.label;
  throw InputError("unknown candidate \"" + *label + "\" (available: " + known + ")");
}

}  // namespace riccati_geom

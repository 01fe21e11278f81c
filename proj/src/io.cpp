#include "fusionlab/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "fusionlab/error.hpp"

namespace fusionlab {

namespace {

struct Tok {
  enum Kind { Ident, String, Punct, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Tok> lex_spec(std::string_view s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = i;
      while (i < s.size()) {
        char d = s[i];
        bool dash = d == '-' && i + 1 < s.size() && s[i + 1] != '>';
        if (!(std::isalnum(static_cast<unsigned char>(d)) || d == '_' || dash)) break;
        ++i;
      }
      out.push_back({Tok::Ident, std::string(s.substr(b, i - b)), b});
    } else if (c == '"') {
      std::size_t b = i++;
      std::string text;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        text += s[i++];
      }
      if (i >= s.size()) throw ParseError("unterminated string", b);
      ++i;
      out.push_back({Tok::String, text, b});
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Punct, "->", i});
      i += 2;
    } else if (std::string_view("{}(),;:").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class SpecParser {
 public:
  SpecParser(std::string_view text, std::filesystem::path base) : toks_(lex_spec(text)), base_(std::move(base)) {}

  SpecFile run() {
    SpecFile out;
    bool have_lang = false;
    while (peek().kind != Tok::End) {
      const Tok& t = ident();
      if (t.text == "language") {
        if (have_lang) throw ParseError("second language block", t.pos);
        out.language = language_block();
        have_lang = true;
      } else if (t.text == "class") {
        if (!have_lang) throw ParseError("class block before the language block", t.pos);
        if (out.cls) throw ParseError("second class block", t.pos);
        std::string name = peek().kind == Tok::Ident ? advance().text : "class";
        out.cls = class_block(name, out.language);
      } else {
        throw ParseError("expected 'language' or 'class', found '" + t.text + "'", t.pos);
      }
    }
    if (!have_lang) throw ParseError("missing language block", 0);
    return out;
  }

 private:
  const Tok& peek() const { return toks_[pos_]; }
  const Tok& advance() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool at(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  void expect(const char* p) {
    if (!at(p)) throw ParseError(std::string("expected '") + p + "', found '" + peek().text + "'", peek().pos);
    advance();
  }
  const Tok& ident() {
    if (peek().kind != Tok::Ident) throw ParseError("expected a name, found '" + peek().text + "'", peek().pos);
    return advance();
  }
  std::vector<std::string> name_list() {
    std::vector<std::string> out{ident().text};
    while (at(",")) {
      advance();
      out.push_back(ident().text);
    }
    return out;
  }

  SortId sort_of(const Language& l, const Tok& t) {
    auto s = l.find_sort(t.text);
    if (!s) throw SortError("unknown sort '" + t.text + "' at offset " + std::to_string(t.pos));
    return *s;
  }

  Language language_block() {
    expect("{");
    Language l = Language::single_sorted();
    bool sorts_given = false, symbols_given = false;
    while (!at("}")) {
      const Tok& kw = ident();
      if (kw.text == "sorts") {
        if (sorts_given || symbols_given) throw ParseError("sorts must come first, once", kw.pos);
        l = Language(name_list());
        sorts_given = true;
      } else if (kw.text == "relations") {
        symbols_given = true;
        do {
          if (at(",")) advance();
          std::string name = ident().text;
          expect("(");
          std::vector<SortId> prof;
          while (!at(")")) {
            if (!prof.empty()) expect(",");
            prof.push_back(sort_of(l, ident()));
          }
          expect(")");
          l.add_relation(name, prof);
        } while (at(","));
      } else if (kw.text == "functions") {
        symbols_given = true;
        do {
          if (at(",")) advance();
          std::string name = ident().text;
          expect("(");
          std::vector<SortId> args;
          while (!at(")")) {
            if (!args.empty()) expect(",");
            args.push_back(sort_of(l, ident()));
          }
          expect(")");
          expect("->");
          l.add_function(name, args, sort_of(l, ident()));
        } while (at(","));
      } else if (kw.text == "constants") {
        symbols_given = true;
        do {
          if (at(",")) advance();
          std::string name = ident().text;
          expect(":");
          l.add_constant(name, sort_of(l, ident()));
        } while (at(","));
      } else {
        throw ParseError("unknown language statement '" + kw.text + "'", kw.pos);
      }
      expect(";");
    }
    expect("}");
    return l;
  }

  ClassSpec class_block(const std::string& name, const Language& l) {
    ClassSpec c(name, l);
    expect("{");
    while (!at("}")) {
      const Tok& kw = ident();
      if (kw.text == "axiom") {
        if (peek().kind != Tok::String) throw ParseError("axiom needs a quoted formula", peek().pos);
        const Tok& f = advance();
        try {
          c.add_axiom(f.text);
        } catch (const ParseError& e) {
          throw ParseError(std::string("in axiom: ") + e.what(), f.pos);
        }
      } else if (kw.text == "symmetric") {
        for (const auto& r : name_list()) c.declare_symmetric(r);
      } else if (kw.text == "irreflexive") {
        for (const auto& r : name_list()) c.declare_irreflexive(r);
      } else if (kw.text == "free-amalgamation") {
        c.set_free_amalgamation(true);
      } else if (kw.text == "forbid") {
        if (peek().kind != Tok::String) throw ParseError("forbid needs a quoted structure path", peek().pos);
        c.forbid(load_structure(base_ / advance().text, l));
      } else {
        throw ParseError("unknown class statement '" + kw.text + "'", kw.pos);
      }
      expect(";");
    }
    expect("}");
    return c;
  }

  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  std::filesystem::path base_;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int lookup(const FiniteStructure& m, SortId s, const std::string& name, const std::string& where) {
  auto e = m.find(s, name);
  if (!e) throw SortError("no element '" + name + "' of sort " + m.language().sort_name(s) + " in " + where);
  return e->index;
}

}  // namespace

SpecFile parse_spec(std::string_view text, const std::filesystem::path& base_dir) {
  return SpecParser(text, base_dir).run();
}

SpecFile load_spec(const std::filesystem::path& path) {
  return parse_spec(read_file(path), path.parent_path());
}

Json structure_to_json(const FiniteStructure& m) {
  const Language& l = m.language();
  Json j;
  j["sorts"] = Json::object();
  for (SortId s = 0; s < l.sort_count(); ++s) {
    Json names = Json::array();
    for (int i = 0; i < m.size(s); ++i) names.push_back(m.name(Elem{s, i}));
    j["sorts"][l.sort_name(s)] = names;
  }
  j["relations"] = Json::object();
  for (std::size_t r = 0; r < l.relation_names().size(); ++r) {
    const auto& prof = m.relation_profile(static_cast<int>(r));
    Json rows = Json::array();
    for (const auto& t : m.tuples(static_cast<int>(r))) {
      Json row = Json::array();
      for (std::size_t k = 0; k < t.size(); ++k) row.push_back(m.name(Elem{prof[k], t[k]}));
      rows.push_back(row);
    }
    j["relations"][l.relation_names()[r]] = rows;
  }
  if (!l.functions().empty()) {
    j["functions"] = Json::object();
    for (std::size_t f = 0; f < l.function_names().size(); ++f) {
      const auto& sym = l.functions().at(l.function_names()[f]);
      Json table = Json::object();
      for (const auto& args : m.all_tuples(sym.args)) {
        std::vector<std::string> names;
        bool comma = false;
        for (std::size_t k = 0; k < args.size(); ++k) {
          names.push_back(m.name(Elem{sym.args[k], args[k]}));
          comma = comma || names.back().find(',') != std::string::npos;
        }
        std::string key;
        if (comma) {
          key = Json(names).dump();
        } else {
          for (std::size_t k = 0; k < names.size(); ++k) key += (k ? "," : "") + names[k];
        }
        int v = m.value(static_cast<int>(f), args);
        table[key] = v == kUndefined ? Json(nullptr) : Json(m.name(Elem{sym.result, v}));
      }
      j["functions"][l.function_names()[f]] = table;
    }
  }
  if (!l.constants().empty()) {
    j["constants"] = Json::object();
    for (std::size_t c = 0; c < l.constant_names().size(); ++c) {
      SortId s = l.constants().at(l.constant_names()[c]);
      int v = m.constant(static_cast<int>(c));
      j["constants"][l.constant_names()[c]] = v == kUndefined ? Json(nullptr) : Json(m.name(Elem{s, v}));
    }
  }
  return j;
}

FiniteStructure structure_from_json(const Json& j, const Language& lang) {
  if (!j.is_object() || !j.contains("sorts")) throw SortError("structure JSON needs a \"sorts\" object");
  for (const auto& [name, v] : j.at("sorts").items()) {
    if (!lang.find_sort(name)) throw SortError("unknown sort '" + name + "' in structure");
  }
  std::vector<int> sizes;
  std::vector<std::vector<std::string>> names;
  for (SortId s = 0; s < lang.sort_count(); ++s) {
    names.emplace_back();
    if (j.at("sorts").contains(lang.sort_name(s))) {
      for (const auto& n : j.at("sorts").at(lang.sort_name(s))) names.back().push_back(n.get<std::string>());
    }
    sizes.push_back(static_cast<int>(names.back().size()));
  }
  FiniteStructure m(lang, sizes);
  for (SortId s = 0; s < lang.sort_count(); ++s) {
    std::set<std::string> seen;
    for (int i = 0; i < sizes[static_cast<std::size_t>(s)]; ++i) {
      const auto& n = names[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
      if (!seen.insert(n).second) throw SortError("duplicate element name '" + n + "'");
      m.set_name(Elem{s, i}, n);
    }
  }
  if (j.contains("relations")) {
    for (const auto& [name, rows] : j.at("relations").items()) {
      if (!lang.relations().count(name)) throw SortError("unknown relation '" + name + "' in structure");
      const auto& prof = lang.relations().at(name).profile;
      for (const auto& row : rows) {
        if (row.size() != prof.size()) throw SortError("tuple of wrong length for '" + name + "'");
        Tuple t;
        for (std::size_t k = 0; k < prof.size(); ++k) t.push_back(lookup(m, prof[k], row[k].get<std::string>(), name));
        m.set(name, t);
      }
    }
  }
  for (const auto& [name, sym] : lang.functions()) {
    if (!j.contains("functions") || !j.at("functions").contains(name)) {
      throw SortError("function '" + name + "' missing from structure");
    }
    for (const auto& [key, val] : j.at("functions").at(name).items()) {
      std::vector<std::string> parts;
      if (!key.empty() && key[0] == '[') {
        for (const auto& p : Json::parse(key)) parts.push_back(p.get<std::string>());
      } else if (!key.empty()) {
        std::stringstream ss(key);
        for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
      }
      if (parts.size() != sym.args.size()) throw SortError("bad argument key '" + key + "' for '" + name + "'");
      Tuple args;
      for (std::size_t k = 0; k < parts.size(); ++k) args.push_back(lookup(m, sym.args[k], parts[k], name));
      m.set_value(name, args, lookup(m, sym.result, val.get<std::string>(), name));
    }
    for (int v : m.function_table(lang.function_index(name))) {
      if (v == kUndefined) throw SortError("function '" + name + "' is not total");
    }
  }
  for (const auto& [name, s] : lang.constants()) {
    if (!j.contains("constants") || !j.at("constants").contains(name)) {
      throw SortError("constant '" + name + "' missing from structure");
    }
    m.set_constant(name, lookup(m, s, j.at("constants").at(name).get<std::string>(), name));
  }
  return m;
}

FiniteStructure load_structure(const std::filesystem::path& path, const Language& lang) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  try {
    return structure_from_json(j, lang);
  } catch (const nlohmann::json::exception& e) {
    throw SortError(path.string() + ": " + e.what());
  }
}

Elem element_by_name(const FiniteStructure& m, const std::string& name) {
  for (SortId s = 0; s < m.language().sort_count(); ++s) {
    if (auto e = m.find(s, name)) return *e;
  }
  throw SortError("no element named '" + name + "'");
}

ElemSet parse_element_set(const FiniteStructure& m, const std::string& text) {
  ElemSet out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    if (!p.empty()) out.insert(element_by_name(m, p));
  }
  return out;
}

Json element_set_json(const FiniteStructure& m, const ElemSet& s) {
  Json out = Json::array();
  for (const auto& e : s) out.push_back(m.name(e));
  return out;
}

Json embedding_to_json(const FiniteStructure& from, const FiniteStructure& to, const Embedding& e) {
  Json out = Json::object();
  for (SortId s = 0; s < from.language().sort_count(); ++s) {
    Json part = Json::object();
    for (int i = 0; i < from.size(s); ++i) {
      int v = e(Elem{s, i});
      part[from.name(Elem{s, i})] = v < 0 ? Json(nullptr) : Json(to.name(Elem{s, v}));
    }
    out[from.language().sort_name(s)] = part;
  }
  return out;
}

Json amalgam_problem_json(const AmalgamProblem& p) {
  Json out;
  out["base"] = structure_to_json(p.base);
  out["b1"] = structure_to_json(p.b1);
  out["b2"] = structure_to_json(p.b2);
  out["f1"] = embedding_to_json(p.base, p.b1, p.f1);
  out["f2"] = embedding_to_json(p.base, p.b2, p.f2);
  return out;
}

}  // namespace fusionlab

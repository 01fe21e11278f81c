#include "fusionlab/structure.hpp"

#include <algorithm>
#include <numeric>

#include "fusionlab/error.hpp"

namespace fusionlab {

namespace {
std::size_t space(const std::vector<int>& sizes, const std::vector<SortId>& profile) {
  std::size_t n = 1;
  for (SortId s : profile) n *= static_cast<std::size_t>(sizes[static_cast<std::size_t>(s)]);
  return n;
}
}  // namespace

FiniteStructure::FiniteStructure(const Language& lang, std::vector<int> sizes)
    : FiniteStructure(std::make_shared<const Language>(lang), std::move(sizes)) {}

FiniteStructure::FiniteStructure(std::shared_ptr<const Language> lang, std::vector<int> sizes)
    : lang_(std::move(lang)), sizes_(std::move(sizes)) {
  if (static_cast<int>(sizes_.size()) != lang_->sort_count()) {
    throw SortError("structure needs one carrier size per sort");
  }
  names_.resize(sizes_.size());
  for (std::size_t s = 0; s < sizes_.size(); ++s) {
    if (sizes_[s] < 0) throw SortError("negative carrier size");
    for (int i = 0; i < sizes_[s]; ++i) names_[s].push_back(std::to_string(i));
  }
  for (const auto& n : lang_->relation_names()) {
    rel_prof_.push_back(lang_->relations().at(n).profile);
    rel_.emplace_back(space(sizes_, rel_prof_.back()), kFalseCell);
  }
  for (const auto& n : lang_->function_names()) {
    fun_prof_.push_back(lang_->functions().at(n).args);
    fun_.emplace_back(space(sizes_, lang_->functions().at(n).args), kUndefined);
  }
  const_.assign(lang_->constant_names().size(), kUndefined);
}

int FiniteStructure::total_size() const { return std::accumulate(sizes_.begin(), sizes_.end(), 0); }

std::vector<Elem> FiniteStructure::elements() const {
  std::vector<Elem> out;
  for (std::size_t s = 0; s < sizes_.size(); ++s) {
    for (int i = 0; i < sizes_[s]; ++i) out.push_back(Elem{static_cast<SortId>(s), i});
  }
  return out;
}

ElemSet FiniteStructure::element_set() const {
  auto v = elements();
  return ElemSet(v.begin(), v.end());
}

const std::string& FiniteStructure::name(Elem e) const {
  return names_.at(static_cast<std::size_t>(e.sort)).at(static_cast<std::size_t>(e.index));
}

void FiniteStructure::set_name(Elem e, std::string name) {
  names_.at(static_cast<std::size_t>(e.sort)).at(static_cast<std::size_t>(e.index)) = std::move(name);
}

std::optional<Elem> FiniteStructure::find(SortId s, const std::string& name) const {
  const auto& ns = names_.at(static_cast<std::size_t>(s));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == name) return Elem{s, static_cast<int>(i)};
  }
  return std::nullopt;
}

std::size_t FiniteStructure::encode(const std::vector<SortId>& profile, const Tuple& t) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    off = off * static_cast<std::size_t>(sizes_[static_cast<std::size_t>(profile[i])]) +
          static_cast<std::size_t>(t[i]);
  }
  return off;
}

Tuple FiniteStructure::decode(const std::vector<SortId>& profile, std::size_t offset) const {
  Tuple t(profile.size());
  for (std::size_t i = profile.size(); i-- > 0;) {
    auto n = static_cast<std::size_t>(sizes_[static_cast<std::size_t>(profile[i])]);
    t[i] = static_cast<int>(offset % n);
    offset /= n;
  }
  return t;
}

std::size_t FiniteStructure::tuple_space(const std::vector<SortId>& profile) const {
  return space(sizes_, profile);
}

std::vector<Tuple> FiniteStructure::all_tuples(const std::vector<SortId>& profile) const {
  std::vector<Tuple> out;
  std::size_t n = tuple_space(profile);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(decode(profile, i));
  return out;
}

std::size_t FiniteStructure::offset_rel(int rel, const Tuple& t) const {
  return encode(rel_prof_[static_cast<std::size_t>(rel)], t);
}

std::size_t FiniteStructure::offset_fun(int fn, const Tuple& t) const {
  return encode(fun_prof_[static_cast<std::size_t>(fn)], t);
}

Elem FiniteStructure::add_element(SortId s, std::string name) {
  std::vector<int> new_sizes = sizes_;
  new_sizes[static_cast<std::size_t>(s)] += 1;
  FiniteStructure grown(lang_, new_sizes);
  grown.names_ = names_;
  Elem e{s, sizes_[static_cast<std::size_t>(s)]};
  grown.names_[static_cast<std::size_t>(s)].push_back(name.empty() ? std::to_string(e.index) : std::move(name));
  for (std::size_t r = 0; r < rel_.size(); ++r) {
    const auto& prof = lang_->relations().at(lang_->relation_names()[r]).profile;
    std::fill(grown.rel_[r].begin(), grown.rel_[r].end(), kUnknownCell);
    for (std::size_t off = 0; off < rel_[r].size(); ++off) {
      grown.rel_[r][grown.encode(prof, decode(prof, off))] = rel_[r][off];
    }
  }
  for (std::size_t f = 0; f < fun_.size(); ++f) {
    const auto& args = lang_->functions().at(lang_->function_names()[f]).args;
    for (std::size_t off = 0; off < fun_[f].size(); ++off) {
      grown.fun_[f][grown.encode(args, decode(args, off))] = fun_[f][off];
    }
  }
  grown.const_ = const_;
  *this = std::move(grown);
  return e;
}

std::vector<Tuple> FiniteStructure::tuples(int rel) const {
  const auto& prof = lang_->relations().at(lang_->relation_names()[static_cast<std::size_t>(rel)]).profile;
  std::vector<Tuple> out;
  const auto& tab = rel_[static_cast<std::size_t>(rel)];
  for (std::size_t off = 0; off < tab.size(); ++off) {
    if (tab[off] == kTrueCell) out.push_back(decode(prof, off));
  }
  return out;
}

std::size_t FiniteStructure::tuple_count(int rel) const {
  const auto& tab = rel_[static_cast<std::size_t>(rel)];
  return static_cast<std::size_t>(std::count(tab.begin(), tab.end(), kTrueCell));
}

bool FiniteStructure::is_complete() const {
  for (const auto& t : rel_) {
    if (std::find(t.begin(), t.end(), kUnknownCell) != t.end()) return false;
  }
  for (const auto& t : fun_) {
    if (std::find(t.begin(), t.end(), kUndefined) != t.end()) return false;
  }
  return std::find(const_.begin(), const_.end(), kUndefined) == const_.end();
}

void FiniteStructure::close_unknown_false() {
  for (auto& t : rel_) std::replace(t.begin(), t.end(), std::uint8_t{kUnknownCell}, std::uint8_t{kFalseCell});
}

FiniteStructure FiniteStructure::induced(const ElemSet& keep) const {
  std::vector<std::vector<int>> remap(sizes_.size());
  std::vector<int> new_sizes(sizes_.size(), 0);
  for (std::size_t s = 0; s < sizes_.size(); ++s) remap[s].assign(static_cast<std::size_t>(sizes_[s]), -1);
  for (const Elem& e : keep) {
    remap[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(e.index)] = new_sizes[static_cast<std::size_t>(e.sort)]++;
  }
  FiniteStructure out(lang_, new_sizes);
  for (const Elem& e : keep) {
    out.names_[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(remap[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(e.index)])] = name(e);
  }
  auto map_tuple = [&](const std::vector<SortId>& prof, const Tuple& t, Tuple& nt) {
    for (std::size_t i = 0; i < prof.size(); ++i) {
      int v = remap[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])];
      if (v < 0) return false;
      nt[i] = v;
    }
    return true;
  };
  for (std::size_t r = 0; r < rel_.size(); ++r) {
    const auto& prof = lang_->relations().at(lang_->relation_names()[r]).profile;
    Tuple nt(prof.size());
    for (std::size_t off = 0; off < rel_[r].size(); ++off) {
      Tuple t = decode(prof, off);
      if (map_tuple(prof, t, nt)) out.rel_[r][out.encode(prof, nt)] = rel_[r][off];
    }
  }
  for (std::size_t f = 0; f < fun_.size(); ++f) {
    const auto& fs = lang_->functions().at(lang_->function_names()[f]);
    Tuple nt(fs.args.size());
    for (std::size_t off = 0; off < fun_[f].size(); ++off) {
      Tuple t = decode(fs.args, off);
      if (!map_tuple(fs.args, t, nt)) continue;
      int v = fun_[f][off];
      int nv = v == kUndefined ? kUndefined : remap[static_cast<std::size_t>(fs.result)][static_cast<std::size_t>(v)];
      if (v != kUndefined && nv < 0) {
        throw Error("induced substructure not closed under '" + lang_->function_names()[f] + "'");
      }
      out.fun_[f][out.encode(fs.args, nt)] = nv;
    }
  }
  for (std::size_t c = 0; c < const_.size(); ++c) {
    int v = const_[c];
    if (v == kUndefined) continue;
    SortId s = lang_->constants().at(lang_->constant_names()[c]);
    int nv = remap[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
    if (nv < 0) throw Error("induced substructure omits constant '" + lang_->constant_names()[c] + "'");
    out.const_[c] = nv;
  }
  return out;
}

FiniteStructure FiniteStructure::reduct(const Language& lang) const {
  if (!lang_->contains(lang)) throw SortError("reduct language is not contained in the structure's language");
  FiniteStructure out(lang, sizes_);
  out.names_ = names_;
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    out.rel_[r] = rel_[static_cast<std::size_t>(lang_->relation_index(lang.relation_names()[r]))];
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    out.fun_[f] = fun_[static_cast<std::size_t>(lang_->function_index(lang.function_names()[f]))];
  }
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    out.const_[c] = const_[static_cast<std::size_t>(lang_->constant_index(lang.constant_names()[c]))];
  }
  return out;
}

FiniteStructure FiniteStructure::expand(const Language& bigger) const {
  if (!bigger.contains(*lang_)) throw SortError("expansion language does not contain the structure's language");
  FiniteStructure out(bigger, sizes_);
  out.names_ = names_;
  for (std::size_t r = 0; r < bigger.relation_names().size(); ++r) {
    const auto& n = bigger.relation_names()[r];
    if (lang_->relations().count(n)) {
      out.rel_[r] = rel_[static_cast<std::size_t>(lang_->relation_index(n))];
    } else {
      std::fill(out.rel_[r].begin(), out.rel_[r].end(), kUnknownCell);
    }
  }
  for (std::size_t f = 0; f < bigger.function_names().size(); ++f) {
    const auto& n = bigger.function_names()[f];
    if (lang_->functions().count(n)) out.fun_[f] = fun_[static_cast<std::size_t>(lang_->function_index(n))];
  }
  for (std::size_t c = 0; c < bigger.constant_names().size(); ++c) {
    const auto& n = bigger.constant_names()[c];
    if (lang_->constants().count(n)) out.const_[c] = const_[static_cast<std::size_t>(lang_->constant_index(n))];
  }
  return out;
}

bool FiniteStructure::operator==(const FiniteStructure& o) const {
  return *lang_ == *o.lang_ && sizes_ == o.sizes_ && names_ == o.names_ && rel_ == o.rel_ &&
         fun_ == o.fun_ && const_ == o.const_;
}

ElemSet Embedding::image(const ElemSet& s) const {
  ElemSet out;
  for (const Elem& e : s) out.insert(apply(e));
  return out;
}

Embedding Embedding::identity(const std::vector<int>& sizes) {
  Embedding e;
  for (int n : sizes) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    e.map.push_back(std::move(m));
  }
  return e;
}

Embedding Embedding::compose(const Embedding& then) const {
  Embedding out = *this;
  for (std::size_t s = 0; s < map.size(); ++s) {
    for (auto& v : out.map[s]) v = then.map[s][static_cast<std::size_t>(v)];
  }
  return out;
}

Embedding Embedding::inverse(const std::vector<int>& target_sizes) const {
  Embedding out;
  for (std::size_t s = 0; s < map.size(); ++s) {
    std::vector<int> inv(static_cast<std::size_t>(target_sizes[s]), -1);
    for (std::size_t i = 0; i < map[s].size(); ++i) inv[static_cast<std::size_t>(map[s][i])] = static_cast<int>(i);
    out.map.push_back(std::move(inv));
  }
  return out;
}

bool Embedding::is_identity() const {
  for (const auto& m : map) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] != static_cast<int>(i)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Compiled evaluation

namespace {

struct TermNode {
  Term::Kind kind;
  int index;  // slot / constant index / function index
  std::vector<TermNode> args;
};

}  // namespace

struct CompiledFormula::Node {
  Formula::Kind kind;
  int rel = -1;
  std::vector<TermNode> terms;
  std::vector<Node> children;
  int slot = -1;
  SortId sort = 0;
};

namespace {

using Node = CompiledFormula::Node;

struct Compiler {
  const Language& lang;
  std::vector<std::pair<Variable, int>> scope;
  int next_slot;

  int lookup(const Variable& v) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == v) return it->second;
    }
    throw Error("variable '" + v.name + "' is not assigned");
  }

  TermNode term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Var:
        return TermNode{t.kind, lookup(t.as_variable()), {}};
      case Term::Kind::Const:
        return TermNode{t.kind, lang.constant_index(t.name), {}};
      case Term::Kind::Apply: {
        TermNode n{t.kind, lang.function_index(t.name), {}};
        for (const auto& a : t.args) n.args.push_back(term(a));
        return n;
      }
    }
    return {};
  }

  Node formula(const Formula& f) {
    Node n;
    n.kind = f.kind;
    if (f.kind == Formula::Kind::Rel) n.rel = lang.relation_index(f.symbol);
    for (const auto& t : f.terms) n.terms.push_back(term(t));
    if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) {
      n.slot = next_slot++;
      n.sort = f.bound.sort;
      scope.emplace_back(f.bound, n.slot);
      n.children.push_back(formula(f.children[0]));
      scope.pop_back();
      return n;
    }
    for (const auto& c : f.children) n.children.push_back(formula(c));
    return n;
  }
};

int max_slots(const Node& n, int base) {
  int m = base;
  int here = n.slot >= 0 ? n.slot + 1 : base;
  for (const auto& c : n.children) m = std::max(m, max_slots(c, here));
  return std::max(m, here);
}

struct Runner {
  const FiniteStructure& m;
  std::vector<int>& vals;

  int term(const TermNode& t) const {
    switch (t.kind) {
      case Term::Kind::Var:
        return vals[static_cast<std::size_t>(t.index)];
      case Term::Kind::Const:
        return m.constant(t.index);
      case Term::Kind::Apply: {
        const auto& prof = m.function_profile(t.index);
        std::size_t off = 0;
        for (std::size_t i = 0; i < t.args.size(); ++i) {
          int v = term(t.args[i]);
          if (v == kUndefined) return kUndefined;
          off = off * static_cast<std::size_t>(m.size(prof[i])) + static_cast<std::size_t>(v);
        }
        return m.function_table(t.index)[off];
      }
    }
    return kUndefined;
  }

  std::uint8_t eval(const Node& n) const {
    switch (n.kind) {
      case Formula::Kind::True:
        return kTrueCell;
      case Formula::Kind::False:
        return kFalseCell;
      case Formula::Kind::Eq: {
        int a = term(n.terms[0]);
        int b = term(n.terms[1]);
        if (a == kUndefined || b == kUndefined) return kUnknownCell;
        return a == b ? kTrueCell : kFalseCell;
      }
      case Formula::Kind::Rel: {
        const auto& prof = m.relation_profile(n.rel);
        std::size_t off = 0;
        for (std::size_t i = 0; i < n.terms.size(); ++i) {
          int v = term(n.terms[i]);
          if (v == kUndefined) return kUnknownCell;
          off = off * static_cast<std::size_t>(m.size(prof[i])) + static_cast<std::size_t>(v);
        }
        return m.table(n.rel)[off];
      }
      case Formula::Kind::Not: {
        auto v = eval(n.children[0]);
        return v == kUnknownCell ? kUnknownCell : (v == kTrueCell ? kFalseCell : kTrueCell);
      }
      case Formula::Kind::And: {
        std::uint8_t r = kTrueCell;
        for (const auto& c : n.children) {
          auto v = eval(c);
          if (v == kFalseCell) return kFalseCell;
          if (v == kUnknownCell) r = kUnknownCell;
        }
        return r;
      }
      case Formula::Kind::Or: {
        std::uint8_t r = kFalseCell;
        for (const auto& c : n.children) {
          auto v = eval(c);
          if (v == kTrueCell) return kTrueCell;
          if (v == kUnknownCell) r = kUnknownCell;
        }
        return r;
      }
      case Formula::Kind::Implies: {
        auto a = eval(n.children[0]);
        if (a == kFalseCell) return kTrueCell;
        auto b = eval(n.children[1]);
        if (b == kTrueCell) return kTrueCell;
        if (a == kTrueCell) return b;
        return kUnknownCell;
      }
      case Formula::Kind::Iff: {
        auto a = eval(n.children[0]);
        auto b = eval(n.children[1]);
        if (a == kUnknownCell || b == kUnknownCell) return kUnknownCell;
        return a == b ? kTrueCell : kFalseCell;
      }
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        bool ex = n.kind == Formula::Kind::Exists;
        std::uint8_t r = ex ? kFalseCell : kTrueCell;
        int size = m.size(n.sort);
        for (int i = 0; i < size; ++i) {
          vals[static_cast<std::size_t>(n.slot)] = i;
          auto v = eval(n.children[0]);
          if (ex && v == kTrueCell) return kTrueCell;
          if (!ex && v == kFalseCell) return kFalseCell;
          if (v == kUnknownCell) r = kUnknownCell;
        }
        return r;
      }
    }
    return kUnknownCell;
  }
};

}  // namespace

CompiledFormula::CompiledFormula(const Formula& f, const Language& lang, std::vector<Variable> vars)
    : vars_(std::move(vars)) {
  Compiler c{lang, {}, static_cast<int>(vars_.size())};
  for (std::size_t i = 0; i < vars_.size(); ++i) c.scope.emplace_back(vars_[i], static_cast<int>(i));
  auto root = std::make_shared<Node>(c.formula(f));
  slot_count_ = max_slots(*root, static_cast<int>(vars_.size()));
  root_ = std::move(root);
}

bool CompiledFormula::operator()(const FiniteStructure& m, const std::vector<int>& values) const {
  return eval3(m, values) == kTrueCell;
}

std::uint8_t CompiledFormula::eval3(const FiniteStructure& m, const std::vector<int>& values) const {
  std::vector<int> vals(static_cast<std::size_t>(slot_count_), 0);
  std::copy(values.begin(), values.end(), vals.begin());
  return Runner{m, vals}.eval(*root_);
}

namespace {
std::vector<int> assignment_values(const Formula& f, const Assignment& a, std::vector<Variable>& vars,
                                   const FiniteStructure& m) {
  vars = free_variables(f);
  if (a.size() != vars.size()) {
    throw Error("assignment must cover exactly the free variables (" + std::to_string(vars.size()) +
                " expected, " + std::to_string(a.size()) + " given)");
  }
  std::vector<int> vals;
  for (const auto& v : vars) {
    auto it = a.find(v);
    if (it == a.end()) throw Error("free variable '" + v.name + "' is not assigned");
    if (it->second < 0 || it->second >= m.size(v.sort)) {
      throw Error("value of '" + v.name + "' is outside its carrier");
    }
    vals.push_back(it->second);
  }
  return vals;
}
}  // namespace

bool evaluate(const FiniteStructure& m, const Formula& f, const Assignment& a) {
  return evaluate3(m, f, a) == kTrueCell;
}

std::uint8_t evaluate3(const FiniteStructure& m, const Formula& f, const Assignment& a) {
  std::vector<Variable> vars;
  auto vals = assignment_values(f, a, vars, m);
  return CompiledFormula(f, m.language(), vars).eval3(m, vals);
}

}  // namespace fusionlab

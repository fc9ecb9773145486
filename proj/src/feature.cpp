#include "punct/feature.hpp"

#include <algorithm>
#include <iterator>

namespace punct {

namespace {

bool FeatureLess(const Category::Feature& f, std::string_view name) {
  return f.first < name;
}

}  // namespace

const FeatureValue* BindingEnv::lookup(std::string_view var) const {
  auto it = std::lower_bound(
      bindings_.begin(), bindings_.end(), var,
      [](const Binding& b, std::string_view v) { return b.first < v; });
  if (it == bindings_.end() || it->first != var) return nullptr;
  return &it->second;
}

FeatureValue BindingEnv::resolve(const FeatureValue& value) const {
  FeatureValue current = value;
  // Chains are acyclic because a variable is never bound to itself.
  while (current.is_var()) {
    const FeatureValue* next = lookup(current.name());
    if (next == nullptr) break;
    current = *next;
  }
  return current;
}

BindingEnv BindingEnv::bind(const std::string& var, FeatureValue value) const {
  BindingEnv out = *this;
  auto it = std::lower_bound(
      out.bindings_.begin(), out.bindings_.end(), var,
      [](const Binding& b, const std::string& v) { return b.first < v; });
  out.bindings_.insert(it, Binding(var, std::move(value)));
  return out;
}

std::optional<BindingEnv> unify_value(const FeatureValue& a,
                                      const FeatureValue& b,
                                      const BindingEnv& env) {
  FeatureValue ra = env.resolve(a);
  FeatureValue rb = env.resolve(b);
  if (ra.is_var()) {
    if (rb.is_var() && rb.name() == ra.name()) return env;
    return env.bind(ra.name(), rb);
  }
  if (rb.is_var()) return env.bind(rb.name(), ra);
  if (ra == rb) return env;
  return std::nullopt;
}

Category::Category(std::string cat, std::vector<Feature> features)
    : cat_(std::move(cat)) {
  for (auto& [name, value] : features) set(name, std::move(value));
}

const FeatureValue* Category::get(std::string_view name) const {
  auto it = std::lower_bound(features_.begin(), features_.end(), name,
                             FeatureLess);
  if (it == features_.end() || it->first != name) return nullptr;
  return &it->second;
}

void Category::set(const std::string& name, FeatureValue value) {
  auto it = std::lower_bound(features_.begin(), features_.end(),
                             std::string_view(name), FeatureLess);
  if (it != features_.end() && it->first == name) {
    it->second = std::move(value);
  } else {
    features_.insert(it, Feature(name, std::move(value)));
  }
}

bool Category::erase(std::string_view name) {
  auto it = std::lower_bound(features_.begin(), features_.end(), name,
                             FeatureLess);
  if (it == features_.end() || it->first != name) return false;
  features_.erase(it);
  return true;
}

bool Category::is_ground() const {
  return std::all_of(features_.begin(), features_.end(),
                     [](const Feature& f) { return f.second.is_ground(); });
}

std::string Category::str() const {
  std::string out = cat_;
  if (features_.empty()) return out;
  out += '[';
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (i > 0) out += ',';
    out += features_[i].first;
    out += '=';
    out += features_[i].second.str();
  }
  out += ']';
  return out;
}

std::optional<BindingEnv> unify_category(const Category& a, const Category& b,
                                         const BindingEnv& env) {
  if (a.cat() != b.cat()) return std::nullopt;
  std::optional<BindingEnv> current = env;
  // Merge walk over the two sorted feature lists; only shared names
  // constrain each other.
  auto ia = a.features().begin();
  auto ib = b.features().begin();
  while (ia != a.features().end() && ib != b.features().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      current = unify_value(ia->second, ib->second, *current);
      if (!current) return std::nullopt;
      ++ia;
      ++ib;
    }
  }
  return current;
}

Category resolve(const Category& c, const BindingEnv& env) {
  if (env.empty()) return c;
  Category out = c;
  for (const auto& [name, value] : c.features()) {
    if (value.is_var()) out.set(name, env.resolve(value));
  }
  return out;
}

Category rename_vars(const Category& c, std::string_view suffix) {
  Category out = c;
  for (const auto& [name, value] : c.features()) {
    if (value.is_var()) {
      out.set(name, FeatureValue::Var(value.name() + std::string(suffix)));
    }
  }
  return out;
}

Category canonicalize(const Category& c) {
  if (c.is_ground()) return c;
  std::vector<std::pair<std::string, int>> counts;  // var -> occurrences
  for (const auto& [name, value] : c.features()) {
    if (!value.is_var()) continue;
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) {
      return p.first == value.name();
    });
    if (it == counts.end()) {
      counts.emplace_back(value.name(), 1);
    } else {
      ++it->second;
    }
  }
  Category out(c.cat());
  int next = 0;
  std::vector<std::pair<std::string, std::string>> renamed;
  for (const auto& [name, value] : c.features()) {
    if (!value.is_var()) {
      out.set(name, value);
      continue;
    }
    auto count = std::find_if(counts.begin(), counts.end(), [&](const auto& p) {
      return p.first == value.name();
    });
    if (count->second < 2) continue;
    auto it = std::find_if(renamed.begin(), renamed.end(), [&](const auto& p) {
      return p.first == value.name();
    });
    if (it == renamed.end()) {
      renamed.emplace_back(value.name(), "_" + std::to_string(++next));
      it = std::prev(renamed.end());
    }
    out.set(name, FeatureValue::Var(it->second));
  }
  return out;
}

}  // namespace punct

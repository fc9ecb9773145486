// Flat feature structures and unification.
//
// A Category is a category symbol plus a small sorted map from feature
// names to atomic values. Values are atoms ("c", "+"), the distinguished
// unset value "-" (written "--" in the linguistic literature), or
// rule-scoped unification variables. There is no nesting and no
// reentrancy beyond shared variable names, so unification reduces to
// pointwise unification of values under a binding environment.

#ifndef PUNCT_FEATURE_HPP_
#define PUNCT_FEATURE_HPP_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace punct {

class FeatureValue {
 public:
  enum class Kind : unsigned char { kUnset, kAtom, kVar };

  FeatureValue() = default;

  static FeatureValue Unset() { return FeatureValue(); }
  static FeatureValue Atom(std::string symbol) {
    return FeatureValue(Kind::kAtom, std::move(symbol));
  }
  static FeatureValue Var(std::string id) {
    return FeatureValue(Kind::kVar, std::move(id));
  }

  Kind kind() const { return kind_; }
  bool is_unset() const { return kind_ == Kind::kUnset; }
  bool is_atom() const { return kind_ == Kind::kAtom; }
  bool is_var() const { return kind_ == Kind::kVar; }
  bool is_ground() const { return kind_ != Kind::kVar; }

  // Atom symbol or variable id; empty for Unset.
  const std::string& name() const { return name_; }

  // Surface form: "-" for Unset, otherwise the name.
  std::string str() const { return is_unset() ? std::string("-") : name_; }

  friend bool operator==(const FeatureValue&, const FeatureValue&) = default;
  friend auto operator<=>(const FeatureValue&, const FeatureValue&) = default;

 private:
  FeatureValue(Kind kind, std::string name)
      : kind_(kind), name_(std::move(name)) {}

  Kind kind_ = Kind::kUnset;
  std::string name_;
};

// Variable bindings produced by unification. Immutable from the outside:
// extending an environment yields a new one.
class BindingEnv {
 public:
  using Binding = std::pair<std::string, FeatureValue>;

  BindingEnv() = default;

  // Direct binding of `var`, or nullptr.
  const FeatureValue* lookup(std::string_view var) const;

  // Follows variable-to-variable chains until an unbound variable or a
  // ground value is reached.
  FeatureValue resolve(const FeatureValue& value) const;

  // Returns a copy with `var` bound to `value`. `var` must be unbound.
  BindingEnv bind(const std::string& var, FeatureValue value) const;

  const std::vector<Binding>& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }

  friend bool operator==(const BindingEnv&, const BindingEnv&) = default;

 private:
  std::vector<Binding> bindings_;  // sorted by variable id
};

std::optional<BindingEnv> unify_value(const FeatureValue& a,
                                      const FeatureValue& b,
                                      const BindingEnv& env);

class Category {
 public:
  using Feature = std::pair<std::string, FeatureValue>;

  Category() = default;
  explicit Category(std::string cat) : cat_(std::move(cat)) {}
  Category(std::string cat, std::vector<Feature> features);

  const std::string& cat() const { return cat_; }
  void set_cat(std::string cat) { cat_ = std::move(cat); }

  // Features sorted by name; names are unique.
  const std::vector<Feature>& features() const { return features_; }

  const FeatureValue* get(std::string_view name) const;
  bool has(std::string_view name) const { return get(name) != nullptr; }
  void set(const std::string& name, FeatureValue value);
  bool erase(std::string_view name);

  // True if no feature value is a variable.
  bool is_ground() const;

  // "cat[f=v,g=w]", or just "cat" without features. Canonical: equal
  // categories always render identically.
  std::string str() const;

  friend bool operator==(const Category&, const Category&) = default;
  friend auto operator<=>(const Category&, const Category&) = default;

 private:
  std::string cat_;
  std::vector<Feature> features_;
};

// Fails if the category symbols differ. A feature present on only one side
// is unconstrained by the other.
std::optional<BindingEnv> unify_category(const Category& a, const Category& b,
                                         const BindingEnv& env);

// Substitutes bound variables; unbound ones stay symbolic.
Category resolve(const Category& c, const BindingEnv& env);

// Renames every variable in `c` by appending `suffix`, so categories from
// different scopes can be unified without accidental capture.
Category rename_vars(const Category& c, std::string_view suffix);

// Normal form for categories that may still hold unbound variables: a
// variable occurring once constrains nothing and is dropped; shared ones
// are renamed "_1", "_2", ... in feature order.
Category canonicalize(const Category& c);

}  // namespace punct

#endif  // PUNCT_FEATURE_HPP_

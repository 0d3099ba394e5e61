#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace mdl {

/// Interned variable name. Equality and hashing are by identity.
class Symbol {
 public:
  Symbol();
  explicit Symbol(std::string_view name);

  const std::string& str() const { return *name_; }
  bool is_wildcard() const;

  friend bool operator==(Symbol a, Symbol b) { return a.name_ == b.name_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.name_ != b.name_; }

  /// Orders by spelling, so containers keyed by Symbol iterate deterministically.
  friend bool operator<(Symbol a, Symbol b) { return a.name_ != b.name_ && *a.name_ < *b.name_; }

  std::size_t hash() const { return std::hash<const void*>{}(name_); }
  const void* id() const { return name_; }

 private:
  const std::string* name_;
};

inline std::ostream& operator<<(std::ostream& os, Symbol s) { return os << s.str(); }

}  // namespace mdl

template <>
struct std::hash<mdl::Symbol> {
  std::size_t operator()(mdl::Symbol s) const noexcept { return s.hash(); }
};

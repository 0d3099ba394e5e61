#include "mdl/symbol.hpp"

#include <mutex>
#include <unordered_set>

namespace mdl {
namespace {

struct SymbolPool {
  std::mutex mu;
  std::unordered_set<std::string> names;

  const std::string* intern(std::string_view name) {
    std::lock_guard lock(mu);
    return &*names.emplace(name).first;
  }
};

SymbolPool& pool() {
  static auto* p = new SymbolPool;
  return *p;
}

}  // namespace

Symbol::Symbol() {
  static const std::string* const wildcard = pool().intern("_");
  name_ = wildcard;
}

Symbol::Symbol(std::string_view name) : name_(pool().intern(name)) {}

bool Symbol::is_wildcard() const { return *name_ == "_"; }

}  // namespace mdl

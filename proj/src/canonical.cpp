#include "mdl/canonical.hpp"

#include <algorithm>
#include <unordered_map>

#include "intern.hpp"

namespace mdl {

namespace {

Config rename_reachable(ExprPtr expr, std::vector<Loc> order, const Store& s) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (const Array* a = s.find(order[i])) {
      for (const Value& v : a->cells()) v.append_locs(order);
    }
  }
  bool identity = order.size() == s.size();
  for (std::size_t i = 0; identity && i < order.size(); ++i) identity = order[i].id == i;
  if (identity) return Config{std::move(expr), s};

  std::unordered_map<std::uint32_t, Loc> to;
  to.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    to.emplace(order[i].id, Loc{static_cast<std::uint32_t>(i)});
  }
  LocMap rename = [&](Loc l) { return to.at(l.id); };
  std::vector<Store::Entry> entries;
  entries.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Array* a = s.find(order[i]);
    // Dangling locations cannot arise from reduction; keep them renamed but unbound.
    if (!a) continue;
    std::vector<Value> cells;
    cells.reserve(a->size());
    for (const Value& v : a->cells()) cells.push_back(map_locs(v, rename));
    entries.emplace_back(Loc{static_cast<std::uint32_t>(i)}, std::make_shared<const Array>(std::move(cells)));
  }
  return Config{map_locs(expr, rename), Store::from_entries(std::move(entries))};
}

}  // namespace

Config canonicalize(const Config& c) {
  std::vector<Loc> order(c.expr->locs().begin(), c.expr->locs().end());
  return rename_reachable(c.expr, std::move(order), c.store);
}

Config canonicalize_value(const Value& v, const Store& s) {
  return canonicalize(Config{Expr::val(v), s});
}

std::size_t ConfigHash::operator()(const Config& c) const {
  return hash_mix(c.expr->hash(), c.store.hash());
}

}  // namespace mdl

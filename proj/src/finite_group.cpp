#include <algorithm>
#include <array>
#include <numeric>

#include "gsbm/channel_model.hpp"
#include "gsbm/errors.hpp"

namespace gsbm {

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> cayley) : cayley_(std::move(cayley)) {
  const int k = order();
  if (k < 2) throw ConfigError("group: order must be at least 2");
  for (const auto& row : cayley_) {
    if (static_cast<int>(row.size()) != k) throw ConfigError("group: Cayley table must be square");
    for (int v : row) {
      if (v < 0 || v >= k) throw ConfigError("group: Cayley entry out of range");
    }
  }
  for (int i = 0; i < k; ++i) {
    std::vector<bool> row_seen(k), col_seen(k);
    for (int j = 0; j < k; ++j) {
      if (row_seen[cayley_[i][j]] || col_seen[cayley_[j][i]]) {
        throw ConfigError("group: Cayley table is not a Latin square");
      }
      row_seen[cayley_[i][j]] = true;
      col_seen[cayley_[j][i]] = true;
    }
  }
  if (k <= 64) {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) throw ConfigError("group: operation is not associative");
  }
  identity_ = -1;
  for (int e = 0; e < k && identity_ < 0; ++e) {
    bool ok = true;
    for (int g = 0; g < k && ok; ++g) ok = mul(e, g) == g && mul(g, e) == g;
    if (ok) identity_ = e;
  }
  if (identity_ < 0) throw ConfigError("group: no identity element");
  inverse_.assign(k, -1);
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      if (mul(g, h) == identity_ && mul(h, g) == identity_) inverse_[g] = h;
    }
    if (inverse_[g] < 0) throw ConfigError("group: element without inverse");
  }
}

FiniteGroup FiniteGroup::cyclic(int k) {
  if (k < 2) throw ConfigError("group: cyclic order must be at least 2");
  std::vector<std::vector<int>> t(k, std::vector<int>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) t[i][j] = (i + j) % k;
  return FiniteGroup(std::move(t));
}

FiniteGroup FiniteGroup::symmetric3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> s{0, 1, 2};
  do {
    perms.push_back(s);
  } while (std::next_permutation(s.begin(), s.end()));
  auto index_of = [&](const std::array<int, 3>& q) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<std::vector<int>> t(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      std::array<int, 3> composed{};
      for (int x = 0; x < 3; ++x) composed[x] = perms[i][perms[j][x]];
      t[i][j] = index_of(composed);
    }
  }
  return FiniteGroup(std::move(t));
}

FiniteGroup FiniteGroup::by_name(const std::string& name) {
  if (name == "S3" || name == "Sym3") return symmetric3();
  if (name.size() >= 2 && name[0] == 'Z') {
    try {
      std::size_t used = 0;
      const int k = std::stoi(name.substr(1), &used);
      if (used == name.size() - 1) return cyclic(k);
    } catch (const std::logic_error&) {
    }
  }
  throw ConfigError("group: unknown group name '" + name + "'");
}

int FiniteGroup::element_order(int g) const {
  int x = g;
  int m = 1;
  while (x != identity_) {
    x = mul(x, g);
    ++m;
  }
  return m;
}

bool FiniteGroup::abelian() const {
  for (int g = 0; g < order(); ++g)
    for (int h = 0; h < order(); ++h)
      if (mul(g, h) != mul(h, g)) return false;
  return true;
}

}  // namespace gsbm

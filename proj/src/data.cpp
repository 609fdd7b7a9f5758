// Copyright 2026 The mculab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mculab/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "mculab/errors.hpp"
#include "mculab/rng.hpp"

namespace mcu {

std::string_view to_string(GeneratorKind k) {
  return k == GeneratorKind::kBlobs ? "blobs" : "moons";
}

GeneratorKind parse_generator(std::string_view s) {
  if (s == "blobs") return GeneratorKind::kBlobs;
  if (s == "moons") return GeneratorKind::kMoons;
  throw ConfigError("unknown dataset kind '" + std::string(s) + "'");
}

void DatasetSpec::validate() const {
  if (class_count < 2) throw ConfigError("dataset needs at least two classes");
  if (kind == GeneratorKind::kMoons && class_count != 2) {
    throw ConfigError("moons generator has exactly two classes");
  }
  if (size < static_cast<std::size_t>(class_count)) {
    throw ConfigError("dataset size must be at least the class count");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw ConfigError("dataset noise must be a finite non-negative number");
  }
  if (dim < 2) throw ConfigError("dataset dim must be at least 2");
  if (kind == GeneratorKind::kMoons && dim != 2) {
    throw ConfigError("moons generator is two-dimensional");
  }
  if (!(radius > 0.0)) throw ConfigError("blob radius must be positive");
}

LabeledDataset make_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const std::size_t n = spec.size;
  Matrix x(n, spec.dim);
  std::vector<int> y(n);

  if (spec.kind == GeneratorKind::kBlobs) {
    const auto k = static_cast<std::size_t>(spec.class_count);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = i % k;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) /
                           static_cast<double>(k);
      x(i, 0) = spec.radius * std::cos(angle);
      x(i, 1) = spec.radius * std::sin(angle);
      for (std::size_t d = 0; d < spec.dim; ++d) x(i, d) += spec.noise * rng.normal();
      y[i] = static_cast<int>(c);
    }
  } else {
    const std::size_t n_upper = (n + 1) / 2;
    const std::size_t n_lower = n - n_upper;
    auto theta = [](std::size_t j, std::size_t m) {
      return m > 1 ? std::numbers::pi * static_cast<double>(j) / static_cast<double>(m - 1)
                   : 0.0;
    };
    for (std::size_t j = 0; j < n_upper; ++j) {
      const double a = theta(j, n_upper);
      x(j, 0) = std::cos(a) + spec.noise * rng.normal();
      x(j, 1) = std::sin(a) + spec.noise * rng.normal();
      y[j] = 0;
    }
    for (std::size_t j = 0; j < n_lower; ++j) {
      const double a = theta(j, n_lower);
      const std::size_t i = n_upper + j;
      x(i, 0) = 1.0 - std::cos(a) + spec.noise * rng.normal();
      x(i, 1) = 0.5 - std::sin(a) + spec.noise * rng.normal();
      y[i] = 1;
    }
  }

  LabeledDataset ordered{std::move(x), std::move(y), spec.class_count};
  const auto perm = rng.permutation(n);
  return ordered.subset(perm);
}

std::size_t round_count(double x) {
  return static_cast<std::size_t>(std::round(x));
}

namespace {

Partition partition_by(const LabeledDataset& data, std::vector<bool> in_first) {
  Partition p;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (in_first[i] ? p.first_rows : p.second_rows).push_back(i);
  }
  p.first = data.subset(p.first_rows);
  p.second = data.subset(p.second_rows);
  return p;
}

// Marks `take` rows of `candidates`, chosen uniformly without replacement.
void choose(Rng& rng, std::vector<std::size_t> candidates, std::size_t take,
            std::vector<bool>& mark) {
  rng.shuffle(candidates);
  for (std::size_t i = 0; i < take; ++i) mark[candidates[i]] = true;
}

}  // namespace

Partition split_random_forgetting(const LabeledDataset& train, double ratio,
                                  std::uint64_t seed, bool stratified) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidInputError("forget ratio must lie in (0, 1)");
  }
  const std::size_t n = train.size();
  std::vector<bool> mark(n, false);
  Rng rng(seed);
  if (stratified) {
    for (int c = 0; c < train.class_count; ++c) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < n; ++i) {
        if (train.labels[i] == c) rows.push_back(i);
      }
      const std::size_t take = round_count(ratio * static_cast<double>(rows.size()));
      choose(rng, std::move(rows), take, mark);
    }
  } else {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    choose(rng, std::move(rows), round_count(ratio * static_cast<double>(n)), mark);
  }
  Partition p = partition_by(train, std::move(mark));
  if (p.first.empty() || p.second.empty()) {
    throw InvalidInputError("forget ratio " + std::to_string(ratio) +
                            " leaves an empty forget or retain set");
  }
  return p;
}

Partition split_validation(const LabeledDataset& pool, double frac,
                           std::uint64_t seed) {
  if (pool.size() < 10) {
    throw InvalidInputError("test pool too small for a validation split");
  }
  if (!(frac > 0.0 && frac < 1.0)) {
    throw InvalidInputError("validation fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> rows(pool.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<bool> mark(pool.size(), false);
  Rng rng(seed);
  choose(rng, std::move(rows), round_count(frac * static_cast<double>(pool.size())),
         mark);
  Partition p = partition_by(pool, std::move(mark));
  if (p.first.empty() || p.second.empty()) {
    throw InvalidInputError("validation split leaves an empty side");
  }
  return p;
}

ClasswiseSplit split_classwise(const LabeledDataset& train,
                               const LabeledDataset& test_pool, int forget_class) {
  auto by_class = [&](const LabeledDataset& d, const char* what) {
    std::vector<bool> mark(d.size());
    bool any = false;
    for (std::size_t i = 0; i < d.size(); ++i) {
      mark[i] = d.labels[i] == forget_class;
      any = any || mark[i];
    }
    if (!any) {
      throw InvalidInputError("forget class " + std::to_string(forget_class) +
                              " absent from " + what);
    }
    return partition_by(d, std::move(mark));
  };
  Partition tr = by_class(train, "training set");
  Partition te = by_class(test_pool, "test pool");
  return {std::move(tr.first), std::move(tr.second), std::move(te.first),
          std::move(te.second)};
}

LabeledDataset subsample_retain(const LabeledDataset& retain, double proportion,
                                std::uint64_t seed) {
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    throw InvalidInputError("retain proportion must lie in (0, 1]");
  }
  if (proportion == 1.0) return retain;
  const std::size_t take = round_count(proportion * static_cast<double>(retain.size()));
  if (take == 0) throw InvalidInputError("retain subsample is empty");
  Rng rng(seed);
  auto perm = rng.permutation(retain.size());
  perm.resize(take);
  std::sort(perm.begin(), perm.end());
  return retain.subset(perm);
}

void save_csv(const std::filesystem::path& path, const LabeledDataset& data) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  for (std::size_t d = 0; d < data.feature_dim(); ++d) f << 'f' << d << ',';
  f << "label\n";
  char buf[32];
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.features.row(r)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      f << buf << ',';
    }
    f << data.labels[r] << '\n';
  }
  if (!f) throw IoError("failed writing " + path.string());
}

LabeledDataset load_csv(const std::filesystem::path& path, int class_count) {
  std::ifstream f(path);
  if (!f) throw ConfigError("missing dataset file " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw IoError("empty dataset file " + path.string());
  const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<double> values;
  std::vector<int> labels;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t d = 0; d < dim; ++d) {
      if (!std::getline(ss, cell, ',')) throw IoError("short row in " + path.string());
      values.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (!std::getline(ss, cell)) throw IoError("missing label in " + path.string());
    labels.push_back(std::stoi(cell));
  }
  LabeledDataset out{Matrix(labels.size(), dim, std::move(values)), std::move(labels),
                     class_count};
  out.validate();
  return out;
}

}  // namespace mcu

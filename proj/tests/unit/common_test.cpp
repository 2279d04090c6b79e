// Copyright 2026 The featfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "featfuse/common.hpp"

namespace featfuse {
namespace {

TEST(MatrixTest, InitializerListAndAccess) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.column(1), (std::vector<double>{2, 5}));
}

TEST(MatrixTest, AppendRowFixesWidth) {
  Matrix m;
  const std::vector<double> a{1, 2};
  m.append_row(a);
  m.append_row(a);
  EXPECT_EQ(m.rows(), 2u);
  const std::vector<double> bad{1, 2, 3};
  EXPECT_THROW(m.append_row(bad), Error);
}

TEST(MatrixTest, SelectRowsAndCols) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const std::vector<std::size_t> rows{2, 0};
  const std::vector<std::size_t> cols{2};
  EXPECT_EQ(m.select_rows(rows), (Matrix{{7, 8, 9}, {1, 2, 3}}));
  EXPECT_EQ(m.select_cols(cols), (Matrix{{3}, {6}, {9}}));
}

TEST(SeedTest, DeriveSeedDependsOnEveryPart) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(2, {2, 3}));
  EXPECT_NE(fnv1a64("train"), fnv1a64("explain"));
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
  }
}

TEST(RngTest, UniformAndBelowStayInRange) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.below(7), 7u);
  }
}

TEST(RngTest, NormalMomentsAreStandard) {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngTest, ShuffleIsAPermutation) {
  Rng rng(3);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(ErrorTest, ExitCodes) {
  EXPECT_EQ(exit_code(ErrorKind::kConfig), 2);
  EXPECT_EQ(exit_code(ErrorKind::kData), 3);
  EXPECT_EQ(exit_code(ErrorKind::kTraining), 4);
  EXPECT_EQ(exit_code(ErrorKind::kExplanation), 5);
  EXPECT_EQ(exit_code(ErrorKind::kIo), 1);
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(13.0), "13");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
}

}  // namespace
}  // namespace featfuse

/*
 * Copyright 2026 The SAGE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "sage/bundle.hpp"
#include "sage/prompts.hpp"

namespace {

TEST(Prompts, BankShape) {
  EXPECT_EQ(sage::kTemplateBank.size(), 80u);
  std::set<std::string_view> unique(sage::kTemplateBank.begin(), sage::kTemplateBank.end());
  EXPECT_EQ(unique.size(), 80u);
  for (auto t : sage::kTemplateBank) EXPECT_EQ(sage::count_occurrences(t, "[CLASS]"), 1u) << t;
}

TEST(Prompts, RowMajorOrder) {
  EXPECT_EQ(sage::kTemplateBank[0], "a bad photo of a [CLASS].");
  EXPECT_EQ(sage::kTemplateBank[1], "a photo of many [CLASS].");
  EXPECT_EQ(sage::kTemplateBank[12], "a bright photo of a [CLASS].");
  EXPECT_EQ(sage::kTemplateBank[14], "a photo of a dirty [CLASS].");
  EXPECT_EQ(sage::kTemplateBank[35], "a [CLASS] in a video game.");
  EXPECT_EQ(sage::kTemplateBank[79], "a tattoo of the [CLASS].");
}

TEST(Prompts, BenchmarkStatistics) {
  const auto b = sage::benchmarks();
  ASSERT_EQ(b.size(), 4u);
  const std::size_t samples[] = {5794, 19962, 9991, 10725};
  const std::size_t classes[] = {2, 2, 7, 5};
  const char* names[] = {"Waterbirds", "CelebA", "PACS", "VLCS"};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(b[k].name, names[k]);
    EXPECT_EQ(b[k].test_samples, samples[k]);
    EXPECT_EQ(b[k].classes.size(), classes[k]);
    EXPECT_EQ(b[k].groups.size(), 4u);
    EXPECT_EQ(b[k].vanilla_prompts.size(), classes[k]);
  }
  EXPECT_EQ(b[0].vanilla_prompts[0], "an image of landbird");
  EXPECT_EQ(b[0].vanilla_prompts[1], "an image of waterbird");
  EXPECT_EQ(b[1].vanilla_prompts[0], "person with dark hair");
  EXPECT_EQ(b[1].vanilla_prompts[1], "person with blond hair");
}

}  // namespace

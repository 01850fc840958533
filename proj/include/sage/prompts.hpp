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

// The 80-template prompt bank, the single-prompt baselines per benchmark and
// the test-split statistics of the four benchmarks. Bank order is row-major
// over the two-column source listing and defines template indices.

#ifndef SAGE_PROMPTS_HPP_
#define SAGE_PROMPTS_HPP_

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace sage {

inline constexpr std::array<std::string_view, 80> kTemplateBank = {
    "a bad photo of a [CLASS].",
    "a photo of many [CLASS].",
    "a sculpture of a [CLASS].",
    "a photo of the hard to see [CLASS].",
    "a low resolution photo of the [CLASS].",
    "a rendering of a [CLASS].",
    "graffiti of a [CLASS].",
    "a bad photo of the [CLASS].",
    "a cropped photo of the [CLASS].",
    "a tattoo of a [CLASS].",
    "the embroidered [CLASS].",
    "a photo of a hard to see [CLASS].",
    "a bright photo of a [CLASS].",
    "a photo of a clean [CLASS].",
    "a photo of a dirty [CLASS].",
    "a dark photo of the [CLASS].",
    "a drawing of a [CLASS].",
    "a photo of my [CLASS].",
    "the plastic [CLASS].",
    "a photo of the cool [CLASS].",
    "a close-up photo of a [CLASS].",
    "a black and white photo of the [CLASS].",
    "a painting of the [CLASS].",
    "a painting of a [CLASS].",
    "a pixelated photo of the [CLASS].",
    "a sculpture of the [CLASS].",
    "a bright photo of the [CLASS].",
    "a cropped photo of a [CLASS].",
    "a plastic [CLASS].",
    "a photo of the dirty [CLASS].",
    "a jpeg corrupted photo of a [CLASS].",
    "a blurry photo of the [CLASS].",
    "a photo of the [CLASS].",
    "a good photo of the [CLASS].",
    "a rendering of the [CLASS].",
    "a [CLASS] in a video game.",
    "a photo of one [CLASS].",
    "a doodle of a [CLASS].",
    "a close-up photo of the [CLASS].",
    "a photo of a [CLASS].",
    "the origami [CLASS].",
    "the [CLASS] in a video game.",
    "a sketch of a [CLASS].",
    "a doodle of the [CLASS].",
    "an origami [CLASS].",
    "a low resolution photo of a [CLASS].",
    "the toy [CLASS].",
    "a rendition of the [CLASS].",
    "a photo of the clean [CLASS].",
    "a photo of a large [CLASS].",
    "a rendition of a [CLASS].",
    "a photo of a nice [CLASS].",
    "a photo of a weird [CLASS].",
    "a blurry photo of a [CLASS].",
    "a cartoon [CLASS].",
    "art of a [CLASS].",
    "a sketch of the [CLASS].",
    "an embroidered [CLASS].",
    "a pixelated photo of a [CLASS].",
    "itap of the [CLASS].",
    "a jpeg corrupted photo of the [CLASS].",
    "a good photo of a [CLASS].",
    "a plushie [CLASS].",
    "a photo of the nice [CLASS].",
    "a photo of the small [CLASS].",
    "a photo of the weird [CLASS].",
    "the cartoon [CLASS].",
    "art of the [CLASS].",
    "a drawing of the [CLASS].",
    "a photo of the large [CLASS].",
    "a black and white photo of a [CLASS].",
    "the plushie [CLASS].",
    "a dark photo of a [CLASS].",
    "itap of a [CLASS].",
    "graffiti of the [CLASS].",
    "a toy [CLASS].",
    "itap of my [CLASS].",
    "a photo of a cool [CLASS].",
    "a photo of a small [CLASS].",
    "a tattoo of the [CLASS].",
};

struct BenchmarkInfo {
  std::string_view name;
  std::size_t test_samples;
  std::vector<std::string_view> classes;
  std::vector<std::string_view> groups;
  // One prompt per class for the single-prompt zero-shot baseline.
  std::vector<std::string_view> vanilla_prompts;
};

inline std::vector<BenchmarkInfo> benchmarks() {
  return {
      {"Waterbirds",
       5794,
       {"landbird", "waterbird"},
       {"landbird in land", "landbird in water", "waterbird on land", "waterbird on water"},
       {"an image of landbird", "an image of waterbird"}},
      {"CelebA",
       19962,
       {"not blond", "blond"},
       {"male & not blond", "female & not blond", "male & blond", "female & blond"},
       {"person with dark hair", "person with blond hair"}},
      // Seven classes; horse restored to the six-name source list.
      {"PACS",
       9991,
       {"dogs", "elephant", "giraffe", "guitar", "horse", "house", "person"},
       {"art", "cartoons", "photos", "sketches"},
       {"dogs", "elephant", "giraffe", "guitar", "horse", "house", "person"}},
      {"VLCS",
       10725,
       {"bird", "car", "chair", "dog", "person"},
       {"Caltech101", "LabelMe", "SUN09", "VOC2007"},
       {"bird", "car", "chair", "dog", "person"}},
  };
}

}  // namespace sage

#endif  // SAGE_PROMPTS_HPP_

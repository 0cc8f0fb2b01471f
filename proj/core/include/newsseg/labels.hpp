#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace newsseg {

/// The five scene classes, in canonical order (index 0..4).
enum class SceneLabel : uint8_t {
  Advertisement = 0,
  Story = 1,
  Studio = 2,
  Transition = 3,
  Visualisation = 4,
};

inline constexpr int kNumLabels = 5;

inline constexpr std::array<SceneLabel, kNumLabels> kAllLabels = {
    SceneLabel::Advertisement, SceneLabel::Story, SceneLabel::Studio,
    SceneLabel::Transition, SceneLabel::Visualisation};

std::string_view label_name(SceneLabel label);

/// Parses one of the five canonical capitalized names. Throws
/// UnknownLabelError for anything else.
SceneLabel parse_label(std::string_view name);

inline int label_index(SceneLabel label) { return static_cast<int>(label); }

SceneLabel label_from_index(int index);

}  // namespace newsseg

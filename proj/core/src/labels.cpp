#include "newsseg/labels.hpp"

#include "newsseg/error.hpp"

namespace newsseg {

namespace {
constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "Advertisement", "Story", "Studio", "Transition", "Visualisation"};
}

std::string_view label_name(SceneLabel label) {
  return kLabelNames[static_cast<size_t>(label)];
}

SceneLabel parse_label(std::string_view name) {
  for (int i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[static_cast<size_t>(i)] == name) {
      return static_cast<SceneLabel>(i);
    }
  }
  throw UnknownLabelError("unknown scene label: \"" + std::string(name) +
                          "\" (expected one of Advertisement, Story, Studio, "
                          "Transition, Visualisation)");
}

SceneLabel label_from_index(int index) {
  if (index < 0 || index >= kNumLabels) {
    throw UnknownLabelError("scene label index out of range: " +
                            std::to_string(index));
  }
  return static_cast<SceneLabel>(index);
}

}  // namespace newsseg

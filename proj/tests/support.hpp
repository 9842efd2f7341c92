#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paneldiag/panel_data.hpp"

namespace testing {

struct Row {
  std::vector<std::int64_t> counts;  // by sorted label
  std::vector<int> votes;            // label id per judge, -1 = missing
};

inline paneldiag::PanelDataset make_dataset(std::vector<std::string> labels, std::size_t judges,
                                            const std::vector<Row>& rows,
                                            std::vector<std::string> families = {}) {
  std::vector<paneldiag::JudgeMeta> meta;
  for (std::size_t j = 0; j < judges; ++j) {
    meta.push_back({"j" + std::to_string(j), families.empty() ? "f" + std::to_string(j) : families[j]});
  }
  std::vector<paneldiag::ItemRecord> items;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    paneldiag::ItemRecord item;
    item.item_id = "item" + std::to_string(i);
    item.human_counts = rows[i].counts;
    for (const int v : rows[i].votes) {
      item.votes.push_back(v < 0 ? std::nullopt : std::optional<paneldiag::LabelId>(static_cast<paneldiag::LabelId>(v)));
    }
    items.push_back(std::move(item));
  }
  return paneldiag::PanelDataset(paneldiag::LabelVocabulary(std::move(labels)), std::move(meta), std::move(items));
}

}  // namespace testing

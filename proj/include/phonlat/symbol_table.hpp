// Copyright 2026 The Phonlat Authors
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

#ifndef PHONLAT_SYMBOL_TABLE_HPP_
#define PHONLAT_SYMBOL_TABLE_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "phonlat/error.hpp"

namespace phonlat {

constexpr int kEpsilonLabel = 0;
constexpr const char* kEpsilonName = "<eps>";

// Bidirectional symbol <-> dense integer id map.  Id 0 is always <eps>.
class SymbolTable {
 public:
  SymbolTable() { add(kEpsilonName); }

  // Returns the id of `name`, inserting it at the next free id if new.
  int add(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
  }

  // Returns -1 if absent.
  int find(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
  }

  bool contains(const std::string& name) const { return find(name) >= 0; }

  const std::string& name(int id) const {
    if (id < 0 || id >= static_cast<int>(names_.size())) {
      throw Error("symbol id out of range: " + std::to_string(id));
    }
    return names_[id];
  }

  int size() const { return static_cast<int>(names_.size()); }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
    return a.names_ == b.names_;
  }
  friend bool operator!=(const SymbolTable& a, const SymbolTable& b) {
    return !(a == b);
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace phonlat

#endif  // PHONLAT_SYMBOL_TABLE_HPP_

// Copyright 2026 The PCARN Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcarn/params.hpp"

#include <stdexcept>

namespace pcarn {

Tensor& ParamStore::create(const std::string& name, Tensor init) {
    if (has(name))
        throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
    index_[name] = entries_.size();
    entries_.push_back(Entry{name, std::move(init), Tensor{}});
    return entries_.back().value;
}

void ParamStore::alias(const std::string& name, const std::string& canonical) {
    if (has(name))
        throw std::invalid_argument("ParamStore: alias '" + name + "' collides with existing name");
    auto it = index_.find(canonical);
    if (it == index_.end())
        throw std::invalid_argument("ParamStore: alias target '" + canonical + "' not found");
    aliases_[name] = canonical;
}

bool ParamStore::has(const std::string& name) const {
    return index_.count(name) != 0 || aliases_.count(name) != 0;
}

bool ParamStore::is_alias(const std::string& name) const {
    return aliases_.count(name) != 0;
}

const std::string& ParamStore::canonical_name(const std::string& name) const {
    auto a = aliases_.find(name);
    if (a != aliases_.end()) return a->second;
    auto it = index_.find(name);
    if (it == index_.end())
        throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
    return entries_[it->second].name;
}

Tensor& ParamStore::value(const std::string& name) {
    return entries_[index_.at(canonical_name(name))].value;
}

const Tensor& ParamStore::value(const std::string& name) const {
    return entries_[index_.at(canonical_name(name))].value;
}

int64_t ParamStore::param_count() const {
    int64_t total = 0;
    for (const auto& e : entries_) total += e.value.count();
    return total;
}

void ParamStore::zero_grads() {
    for (auto& e : entries_) e.grad = Tensor{};
}

Var ParamBinding::operator()(const std::string& name) {
    const std::string& canon = store_->canonical_name(name);
    auto it = leaves_.find(canon);
    if (it != leaves_.end()) return it->second;
    Var leaf = Var::leaf(store_->value(canon), trainable_);
    leaves_.emplace(canon, leaf);
    return leaf;
}

void ParamBinding::collect_grads() {
    for (auto& e : store_->entries()) {
        auto it = leaves_.find(e.name);
        if (it != leaves_.end() && !it->second.node->grad.empty())
            e.grad = it->second.node->grad;
    }
}

} // namespace pcarn

#include "mockingbird/memory/branch.hpp"

#include <algorithm>

#include "mockingbird/prompts.hpp"

namespace mockingbird::memory {

namespace {

void check_unique(const std::vector<MockInvocation>& list, const std::string& branch_id) {
  std::set<std::string> ids;
  for (const auto& inv : list) {
    if (!ids.insert(inv.id).second) {
      throw DuplicateInvocationError("duplicate invocation id " + inv.id + " in branch " + branch_id);
    }
  }
}

}  // namespace

MemoryBranch::MemoryBranch(std::string id, ChatMessage system_prompt)
    : id_(std::move(id)), system_prompt_(std::move(system_prompt)) {}

std::shared_ptr<MemoryBranch> MemoryBranch::create(std::string branch_id, ChatMessage system_prompt) {
  if (system_prompt.role != Role::system || system_prompt.content.empty()) {
    throw MemoryError("a branch needs a non-empty system prompt");
  }
  return std::shared_ptr<MemoryBranch>(new MemoryBranch(std::move(branch_id), std::move(system_prompt)));
}

std::optional<ParentLink> MemoryBranch::parent() const {
  std::lock_guard lock(mutex_);
  return parent_link_;
}

BranchState MemoryBranch::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

ChatMessage MemoryBranch::system_prompt() const {
  std::lock_guard lock(mutex_);
  return system_prompt_;
}

void MemoryBranch::set_system_prompt(ChatMessage prompt) {
  std::lock_guard lock(mutex_);
  require_active();
  if (prompt.role != Role::system || prompt.content.empty()) throw MemoryError("invalid system prompt");
  system_prompt_ = std::move(prompt);
}

std::vector<ChatMessage> MemoryBranch::render_context() const {
  std::lock_guard lock(mutex_);
  std::vector<ChatMessage> out;
  out.reserve(1 + supplements_.size() + 1 + 2 * invocations_.size());
  out.push_back(system_prompt_);
  for (const auto& [key, msg] : supplements_) out.push_back(msg);
  if (compressed_summary_) out.push_back(ChatMessage::system(prompts::compressed_notes(*compressed_summary_)));
  for (const auto& inv : invocations_) {
    out.push_back(inv.request_message());
    out.push_back(inv.response_message());
  }
  return out;
}

std::vector<MockInvocation> MemoryBranch::invocations() const {
  std::lock_guard lock(mutex_);
  return invocations_;
}

std::size_t MemoryBranch::size() const {
  std::lock_guard lock(mutex_);
  return invocations_.size();
}

std::optional<MockInvocation> MemoryBranch::find(const std::string& invocation_id) const {
  std::lock_guard lock(mutex_);
  for (const auto& inv : invocations_) {
    if (inv.id == invocation_id) return inv;
  }
  return std::nullopt;
}

void MemoryBranch::append(MockInvocation invocation) {
  std::lock_guard lock(mutex_);
  require_active();
  for (const auto& inv : invocations_) {
    if (inv.id == invocation.id) {
      throw DuplicateInvocationError("invocation " + invocation.id + " already present in branch " + id_);
    }
  }
  invocations_.push_back(std::move(invocation));
}

void MemoryBranch::update_invocation(const std::string& invocation_id, Json new_results, std::string new_remarks) {
  std::lock_guard lock(mutex_);
  require_active();
  auto it = locate(invocation_id);
  it->results = std::move(new_results);
  it->remarks = std::move(new_remarks);
}

void MemoryBranch::mark_reflected(const std::string& invocation_id, Json ground_truth) {
  std::lock_guard lock(mutex_);
  require_active();
  auto it = locate(invocation_id);
  it->ground_truth = std::move(ground_truth);
  it->reflected = true;
}

void MemoryBranch::edit_invocations(const std::function<void(std::vector<MockInvocation>&)>& edit) {
  std::lock_guard lock(mutex_);
  require_active();
  auto working = invocations_;
  edit(working);
  check_unique(working, id_);
  invocations_ = std::move(working);
}

void MemoryBranch::clear_invocations() {
  std::lock_guard lock(mutex_);
  require_active();
  invocations_.clear();
}

std::optional<std::string> MemoryBranch::compressed_summary() const {
  std::lock_guard lock(mutex_);
  return compressed_summary_;
}

void MemoryBranch::set_compressed_summary(std::optional<std::string> summary) {
  std::lock_guard lock(mutex_);
  require_active();
  compressed_summary_ = std::move(summary);
}

bool MemoryBranch::add_supplement(const std::string& key, ChatMessage message) {
  std::lock_guard lock(mutex_);
  require_active();
  for (const auto& [k, m] : supplements_) {
    if (k == key) return false;
  }
  supplements_.emplace_back(key, std::move(message));
  return true;
}

std::vector<ChatMessage> MemoryBranch::supplements() const {
  std::lock_guard lock(mutex_);
  std::vector<ChatMessage> out;
  for (const auto& [k, m] : supplements_) out.push_back(m);
  return out;
}

Json MemoryBranch::to_json() const {
  std::lock_guard lock(mutex_);
  Json out;
  out["branch_id"] = id_;
  if (parent_link_) {
    out["parent"] = Json{{"branch_id", parent_link_->branch_id}, {"creation_index", parent_link_->creation_index}};
  } else {
    out["parent"] = nullptr;
  }
  out["system_prompt"] = system_prompt_.content;
  out["supplements"] = Json::array();
  for (const auto& [k, m] : supplements_) {
    out["supplements"].push_back(Json{{"key", k}, {"role", to_string(m.role)}, {"content", m.content}});
  }
  out["compressed_summary"] = compressed_summary_ ? Json(*compressed_summary_) : Json();
  out["invocations"] = Json::array();
  for (const auto& inv : invocations_) out["invocations"].push_back(invocation_to_json(inv));
  return out;
}

std::shared_ptr<MemoryBranch> MemoryBranch::from_json(const Json& doc) {
  auto branch = create(doc.at("branch_id").get<std::string>(),
                       ChatMessage::system(doc.at("system_prompt").get<std::string>()));
  if (doc.contains("parent") && doc["parent"].is_object()) {
    branch->parent_link_ = ParentLink{doc["parent"].at("branch_id").get<std::string>(),
                                      doc["parent"].at("creation_index").get<std::size_t>()};
  }
  if (doc.contains("supplements")) {
    for (const auto& s : doc["supplements"]) {
      branch->supplements_.emplace_back(
          s.at("key").get<std::string>(),
          message_from_json(Json{{"role", s.value("role", std::string("system"))}, {"content", s.at("content")}}));
    }
  }
  if (doc.contains("compressed_summary") && doc["compressed_summary"].is_string()) {
    branch->compressed_summary_ = doc["compressed_summary"].get<std::string>();
  }
  for (const auto& inv : doc.at("invocations")) branch->invocations_.push_back(invocation_from_json(inv));
  check_unique(branch->invocations_, branch->id_);
  return branch;
}

void MemoryBranch::require_active() const {
  if (state_ != BranchState::active) throw BranchClosedError("branch " + id_ + " is no longer active");
}

std::vector<MockInvocation>::iterator MemoryBranch::locate(const std::string& invocation_id) {
  auto it = std::find_if(invocations_.begin(), invocations_.end(),
                         [&](const MockInvocation& inv) { return inv.id == invocation_id; });
  if (it == invocations_.end()) throw NotFoundError("invocation " + invocation_id + " not found in branch " + id_);
  return it;
}

std::shared_ptr<MemoryBranch> create_branch(const std::shared_ptr<MemoryBranch>& parent, std::string child_id) {
  std::lock_guard lock(parent->mutex_);
  parent->require_active();
  auto child = std::shared_ptr<MemoryBranch>(new MemoryBranch(std::move(child_id), parent->system_prompt_));
  child->supplements_ = parent->supplements_;
  child->compressed_summary_ = parent->compressed_summary_;
  child->invocations_ = parent->invocations_;
  child->parent_ = parent;
  child->parent_link_ = ParentLink{parent->id_, parent->invocations_.size()};
  for (const auto& inv : parent->invocations_) child->inherited_ids_.insert(inv.id);
  return child;
}

void commit_branch(MemoryBranch& child) {
  auto parent = child.parent_.lock();
  if (!parent) {
    std::lock_guard lock(child.mutex_);
    child.require_active();
    throw OrphanBranchError("parent of branch " + child.id_ + " no longer exists");
  }
  std::scoped_lock lock(parent->mutex_, child.mutex_);
  child.require_active();
  if (parent->state_ != BranchState::active) {
    throw OrphanBranchError("parent " + parent->id_ + " of branch " + child.id_ + " was closed");
  }

  std::vector<MockInvocation> added;
  for (const auto& inv : child.invocations_) {
    if (!child.inherited_ids_.contains(inv.id)) added.push_back(inv);
  }
  for (const auto& inv : added) {
    for (const auto& existing : parent->invocations_) {
      if (existing.id == inv.id) {
        throw DuplicateInvocationError("commit of branch " + child.id_ + " would duplicate invocation " + inv.id);
      }
    }
  }

  auto at = std::min(child.parent_link_->creation_index, parent->invocations_.size());
  parent->invocations_.insert(parent->invocations_.begin() + static_cast<std::ptrdiff_t>(at), added.begin(),
                              added.end());
  child.state_ = BranchState::committed;
}

void drop_branch(MemoryBranch& branch) {
  std::lock_guard lock(branch.mutex_);
  branch.require_active();
  branch.state_ = BranchState::dropped;
}

}  // namespace mockingbird::memory

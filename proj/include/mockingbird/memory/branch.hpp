#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mockingbird/memory/message.hpp"

namespace mockingbird::memory {

class MemoryError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public MemoryError {
 public:
  using MemoryError::MemoryError;
};

/// Commit of a branch whose parent no longer exists or was dropped.
class OrphanBranchError : public MemoryError {
 public:
  using MemoryError::MemoryError;
};

class DuplicateInvocationError : public MemoryError {
 public:
  using MemoryError::MemoryError;
};

/// Use of a branch after it was committed or dropped.
class BranchClosedError : public MemoryError {
 public:
  using MemoryError::MemoryError;
};

enum class BranchState { active, committed, dropped };

struct ParentLink {
  std::string branch_id;
  std::size_t creation_index = 0;
};

/// An editable chat history whose elements are invocations.
///
/// Rendered layout: system prompt, supplementary system blocks (reference
/// material), the compressed summary if any, then one user/assistant pair per
/// invocation. Sub-branches snapshot the invocation list at creation and are
/// either dropped or committed back at their creation point.
///
/// Each branch is internally synchronized; distinct branches may be mutated
/// from different threads.
class MemoryBranch {
 public:
  static std::shared_ptr<MemoryBranch> create(std::string branch_id, ChatMessage system_prompt);

  MemoryBranch(const MemoryBranch&) = delete;
  MemoryBranch& operator=(const MemoryBranch&) = delete;

  const std::string& id() const noexcept { return id_; }
  std::optional<ParentLink> parent() const;
  BranchState state() const;

  ChatMessage system_prompt() const;
  void set_system_prompt(ChatMessage prompt);

  std::vector<ChatMessage> render_context() const;

  std::vector<MockInvocation> invocations() const;
  std::size_t size() const;
  std::optional<MockInvocation> find(const std::string& invocation_id) const;

  /// Throws DuplicateInvocationError if the id is already present.
  void append(MockInvocation invocation);

  /// Replaces results and remarks; the rendered assistant message follows.
  void update_invocation(const std::string& invocation_id, Json new_results, std::string new_remarks);

  /// Records the ground truth and flags the invocation as reflected.
  void mark_reflected(const std::string& invocation_id, Json ground_truth);

  /// Arbitrary edit of the invocation list under the branch lock. Ids must stay unique.
  void edit_invocations(const std::function<void(std::vector<MockInvocation>&)>& edit);

  void clear_invocations();

  std::optional<std::string> compressed_summary() const;
  void set_compressed_summary(std::optional<std::string> summary);

  /// Adds a system block after the system prompt. Returns false if `key` is already present.
  bool add_supplement(const std::string& key, ChatMessage message);
  std::vector<ChatMessage> supplements() const;

  Json to_json() const;
  /// Restores a snapshot as a root branch (no live parent).
  static std::shared_ptr<MemoryBranch> from_json(const Json& doc);

 private:
  MemoryBranch(std::string id, ChatMessage system_prompt);

  void require_active() const;
  std::vector<MockInvocation>::iterator locate(const std::string& invocation_id);

  friend std::shared_ptr<MemoryBranch> create_branch(const std::shared_ptr<MemoryBranch>& parent,
                                                     std::string child_id);
  friend void commit_branch(MemoryBranch& child);
  friend void drop_branch(MemoryBranch& branch);

  mutable std::mutex mutex_;
  std::string id_;
  ChatMessage system_prompt_;
  std::vector<std::pair<std::string, ChatMessage>> supplements_;
  std::optional<std::string> compressed_summary_;
  std::vector<MockInvocation> invocations_;
  BranchState state_ = BranchState::active;

  std::weak_ptr<MemoryBranch> parent_;
  std::optional<ParentLink> parent_link_;
  std::set<std::string> inherited_ids_;
};

/// Child branch inheriting the parent's current context.
std::shared_ptr<MemoryBranch> create_branch(const std::shared_ptr<MemoryBranch>& parent, std::string child_id);

/// Inserts the invocations the child added since creation into the parent at the
/// creation index (clamped to the parent's size), ahead of anything the parent
/// appended in the meantime. The child is closed afterwards.
void commit_branch(MemoryBranch& child);

/// Closes the branch without touching its parent.
void drop_branch(MemoryBranch& branch);

}  // namespace mockingbird::memory

#include <gtest/gtest.h>

#include "mockingbird/memory/branch.hpp"
#include "mockingbird/prompts.hpp"
#include "support.hpp"

using namespace mockingbird;
using namespace mockingbird::memory;
using mbtest::ids_of;
using mbtest::invocation;

namespace {

std::shared_ptr<MemoryBranch> root() { return MemoryBranch::create("main", ChatMessage::system("be the function")); }

std::vector<Role> roles(const std::vector<ChatMessage>& messages) {
  std::vector<Role> out;
  for (const auto& m : messages) out.push_back(m.role);
  return out;
}

}  // namespace

TEST(Message, TokenEstimateIsCeilQuarter) {
  EXPECT_EQ(estimate_tokens(""), 0u);
  EXPECT_EQ(estimate_tokens("abc"), 1u);
  EXPECT_EQ(estimate_tokens("abcd"), 1u);
  EXPECT_EQ(estimate_tokens("abcde"), 2u);
  EXPECT_EQ(ChatMessage::user("abcdefgh").token_estimate, 2u);
}

TEST(Message, InvocationMirrorsMessages) {
  auto inv = invocation("a", "Died");
  EXPECT_EQ(inv.request_message().role, Role::user);
  EXPECT_EQ(inv.request_message().content, R"({"n":"a"})");
  EXPECT_EQ(inv.response_message().content, R"({"remarks":"r-a","results":"Died"})");
}

TEST(Message, InvocationJsonRoundTrip) {
  auto inv = invocation("a", 3.5, Json(4), true);
  inv.created_at = TimePoint(std::chrono::seconds(10));
  auto back = invocation_from_json(invocation_to_json(inv));
  EXPECT_EQ(back.id, inv.id);
  EXPECT_EQ(back.results, inv.results);
  EXPECT_EQ(back.ground_truth, inv.ground_truth);
  EXPECT_TRUE(back.reflected);
  EXPECT_EQ(back.created_at, inv.created_at);
}

TEST(Render, EmptyBranchIsSystemOnly) {
  auto b = root();
  auto ctx = b->render_context();
  ASSERT_EQ(ctx.size(), 1u);
  EXPECT_EQ(ctx[0], ChatMessage::system("be the function"));
}

TEST(Render, TwoInvocationsAlternate) {
  auto b = root();
  b->append(invocation("a", 1));
  b->append(invocation("b", 2));
  EXPECT_EQ(roles(b->render_context()),
            (std::vector<Role>{Role::system, Role::user, Role::assistant, Role::user, Role::assistant}));
}

TEST(Render, CompressedSummaryPrecedesInvocations) {
  auto b = root();
  b->set_compressed_summary("S");
  b->append(invocation("a", 1));
  auto ctx = b->render_context();
  ASSERT_EQ(ctx.size(), 4u);
  EXPECT_EQ(ctx[1].content.find("Summary of what you learned"), 0u);
  EXPECT_NE(ctx[1].content.find("S"), std::string::npos);
  EXPECT_EQ(ctx[1].content, prompts::compressed_notes("S"));
  EXPECT_EQ(ctx[2].role, Role::user);
  EXPECT_EQ(ctx[3].role, Role::assistant);
}

TEST(Render, SupplementsFollowSystemPrompt) {
  auto b = root();
  b->append(invocation("a", 1));
  EXPECT_TRUE(b->add_supplement("rag:x", ChatMessage::system("table")));
  EXPECT_FALSE(b->add_supplement("rag:x", ChatMessage::system("table again")));
  auto ctx = b->render_context();
  ASSERT_EQ(ctx.size(), 4u);
  EXPECT_EQ(ctx[1].content, "table");
}

TEST(Branch, ChildSnapshotsParent) {
  auto parent = root();
  for (const char* id : {"a", "b", "c"}) parent->append(invocation(id, 0));
  auto child = create_branch(parent, "child");
  parent->append(invocation("d", 0));
  EXPECT_EQ(ids_of(*child), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(child->parent()->creation_index, 3u);
  EXPECT_EQ(child->parent()->branch_id, "main");
}

TEST(Branch, EmptyParentGivesEmptyChild) {
  auto parent = root();
  auto child = create_branch(parent, "child");
  EXPECT_EQ(child->size(), 0u);
  EXPECT_EQ(child->render_context(), parent->render_context());
}

TEST(Branch, SiblingsAreIsolated) {
  auto parent = root();
  parent->append(invocation("a", 0));
  auto left = create_branch(parent, "left");
  auto right = create_branch(parent, "right");
  left->append(invocation("l", 0));
  right->append(invocation("r", 0));
  EXPECT_EQ(ids_of(*left), (std::vector<std::string>{"a", "l"}));
  EXPECT_EQ(ids_of(*right), (std::vector<std::string>{"a", "r"}));
  EXPECT_EQ(ids_of(*parent), (std::vector<std::string>{"a"}));
}

TEST(Branch, CommitInsertsAtCreationPoint) {
  auto parent = root();
  parent->append(invocation("A", 0));
  parent->append(invocation("B", 0));
  auto child = create_branch(parent, "child");
  child->append(invocation("X", 0));
  child->append(invocation("Y", 0));
  parent->append(invocation("C", 0));
  commit_branch(*child);
  EXPECT_EQ(ids_of(*parent), (std::vector<std::string>{"A", "B", "X", "Y", "C"}));
  EXPECT_EQ(child->state(), BranchState::committed);
  EXPECT_THROW(child->append(invocation("Z", 0)), BranchClosedError);
}

TEST(Branch, EmptyCommitAndDropLeaveParentAlone) {
  auto parent = root();
  parent->append(invocation("A", 0));
  auto before = parent->render_context();
  commit_branch(*create_branch(parent, "c1"));
  EXPECT_EQ(parent->render_context(), before);
  auto dropped = create_branch(parent, "c2");
  dropped->append(invocation("X", 0));
  drop_branch(*dropped);
  EXPECT_EQ(parent->render_context(), before);
  EXPECT_EQ(dropped->state(), BranchState::dropped);
}

TEST(Branch, CommitAfterParentShrankClamps) {
  auto parent = root();
  for (const char* id : {"a", "b", "c"}) parent->append(invocation(id, 0));
  auto child = create_branch(parent, "child");
  child->append(invocation("x", 0));
  parent->clear_invocations();
  commit_branch(*child);
  EXPECT_EQ(ids_of(*parent), (std::vector<std::string>{"x"}));
}

TEST(Branch, OrphanCommitFails) {
  std::shared_ptr<MemoryBranch> child;
  {
    auto parent = root();
    child = create_branch(parent, "child");
  }
  child->append(invocation("x", 0));
  EXPECT_THROW(commit_branch(*child), OrphanBranchError);

  auto parent = root();
  auto second = create_branch(parent, "second");
  drop_branch(*parent);
  EXPECT_THROW(commit_branch(*second), OrphanBranchError);
}

TEST(Branch, DuplicateIdsRejected) {
  auto b = root();
  b->append(invocation("a", 0));
  EXPECT_THROW(b->append(invocation("a", 1)), DuplicateInvocationError);

  auto parent = root();
  auto child = create_branch(parent, "child");
  child->append(invocation("x", 0));
  parent->append(invocation("x", 0));
  EXPECT_THROW(commit_branch(*child), DuplicateInvocationError);
}

TEST(Update, ReflectionRewritesAssistantMessage) {
  auto b = root();
  b->append(invocation("a", 0));
  b->update_invocation("a", 1, "note");
  b->mark_reflected("a", 1);
  auto ctx = b->render_context();
  EXPECT_EQ(ctx.back().content, R"({"remarks":"note","results":1})");
  auto stored = b->find("a");
  ASSERT_TRUE(stored);
  EXPECT_TRUE(stored->reflected);
  EXPECT_EQ(stored->ground_truth, Json(1));
}

TEST(Update, IdempotentAndDeterministic) {
  auto b = root();
  b->append(invocation("a", 0));
  auto before = b->render_context();
  b->update_invocation("a", 0, "r-a");
  EXPECT_EQ(b->render_context(), before);
  b->update_invocation("a", 2, "x");
  EXPECT_EQ(b->render_context(), b->render_context());
  EXPECT_THROW(b->update_invocation("missing", 0, ""), NotFoundError);
}

TEST(Snapshot, JsonRoundTrip) {
  auto b = root();
  b->add_supplement("rag:x", ChatMessage::system("table"));
  b->set_compressed_summary("S");
  b->append(invocation("a", 1, Json(1)));
  auto restored = MemoryBranch::from_json(b->to_json());
  EXPECT_EQ(restored->render_context(), b->render_context());
  EXPECT_EQ(restored->to_json(), b->to_json());
  EXPECT_FALSE(restored->parent().has_value());
}

// Copyright 2026 The dualvoice Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DUALVOICE_COMMAND_ENGINE_H_
#define DUALVOICE_COMMAND_ENGINE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dualvoice/recognizer.h"

namespace dualvoice {

enum class CommandKind {
  kSymbol,          // insert argument, attached to the previous character
  kCharacter,       // insert argument as a word (whispered letters)
  kNumber,          // menu selection, or a digit outside the menu
  kNewline,
  kParagraph,
  kSpace,
  kBack,            // remove the last word
  kDelete,          // remove the last character
  kDeleteWord,
  kDeleteSentence,
  kDeleteLine,
  kSpell,
  kMenu,
  kClose,
  kNo,
  kEmotion,
  kReserved,        // registered, no defined effect
};

struct Command {
  CommandKind kind = CommandKind::kReserved;
  std::string argument;
  int number = 0;
  std::string phrase;
};

// Whispered phrase -> command. Multi-word phrases win over their prefixes.
// Config lines read `phrase = action [argument]`; `#` starts a comment line.
class CommandGrammar {
 public:
  static CommandGrammar Default();
  static CommandGrammar Parse(const std::string& config);
  static CommandGrammar Load(const std::string& path);

  void Add(const std::string& phrase, Command command);

  // Splits text into commands, longest phrase first. Empty when any word
  // is not covered; `unknown` then names the first offending word.
  std::optional<std::vector<Command>> ParseUtterance(
      const std::string& text, std::string* unknown = nullptr) const;

  const std::map<std::string, Command>& phrases() const { return phrases_; }

 private:
  std::map<std::string, Command> phrases_;
  std::size_t max_words_ = 1;
};

// The grammar shipped with the engine, in config syntax.
const char* DefaultGrammarConfig();

// word -> UTF-8 emoji; config lines read `word = U+1F60A` (codepoints may
// be space separated) or `word = <literal>`.
class EmojiTable {
 public:
  static EmojiTable Default();  // smile, laugh, sad, heart
  static EmojiTable Parse(const std::string& config);
  static EmojiTable Load(const std::string& path);

  void Set(const std::string& word, const std::string& utf8) { map_[word] = utf8; }
  std::optional<std::string> Find(const std::string& word) const;
  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

std::string EncodeUtf8(char32_t codepoint);

struct TextSpan {
  std::size_t begin = 0;  // byte offsets into the document
  std::size_t end = 0;
};

struct CandidateMenu {
  std::vector<std::string> candidates;
  TextSpan target;
};

struct EditorState {
  std::string text;
  std::optional<TextSpan> last_utterance;  // latest normal-voice insertion
  std::vector<std::string> last_alternatives;
  std::optional<CandidateMenu> menu;
};

struct ApplyOutcome {
  bool changed = false;  // document text changed
  bool menu_opened = false;
  std::vector<std::string> warnings;
};

// Single-owner editor state machine. Normal transcripts insert text;
// whispered transcripts only ever run commands.
class CommandEngine {
 public:
  CommandEngine() : CommandEngine(CommandGrammar::Default(), EmojiTable::Default()) {}
  CommandEngine(CommandGrammar grammar, EmojiTable emoji)
      : grammar_(std::move(grammar)), emoji_(std::move(emoji)) {}

  ApplyOutcome Apply(const TranscriptEvent& event);
  ApplyOutcome ApplyNormal(const TranscriptEvent& event);
  ApplyOutcome ApplyWhisper(const TranscriptEvent& event);

  const EditorState& state() const { return state_; }
  const std::string& text() const { return state_.text; }
  const CommandGrammar& grammar() const { return grammar_; }

 private:
  void Execute(const Command& cmd, ApplyOutcome& out);
  void InsertWord(const std::string& word);
  void Append(const std::string& s);
  // Replaces text[pos..] and drops the menu target if the edit reaches it.
  void ReplaceTail(std::size_t pos, const std::string& with);
  void SpellCommit(ApplyOutcome& out);
  void EmotionCommit(ApplyOutcome& out);
  void DeleteBackTo(std::size_t stop_after);
  void DeleteLastWord();

  CommandGrammar grammar_;
  EmojiTable emoji_;
  EditorState state_;
};

}  // namespace dualvoice

#endif  // DUALVOICE_COMMAND_ENGINE_H_

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

#include "dualvoice/command_engine.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dualvoice/error.h"

namespace dualvoice {
namespace {

std::vector<std::string> SplitWords(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  for (std::string w; in >> w;) {
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    words.push_back(w);
  }
  return words;
}

std::string Join(const std::vector<std::string>& words, std::size_t from,
                 std::size_t count) {
  std::string out;
  for (std::size_t i = from; i < from + count; ++i) {
    if (i > from) out += ' ';
    out += words[i];
  }
  return out;
}

std::string Trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool IsSpace(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

bool IsSentenceEnd(char c) { return c == '.' || c == '?' || c == '!'; }

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Characters a following word attaches to without a space.
bool AttachesNext(const std::string& text) {
  const char c = text.back();
  if (IsSpace(c)) return true;
  switch (c) {
    case '(':
    case '[':
    case '{':
    case '-':
    case '_':
    case '@':
    case '#':
    case '$':
      return true;
    case '"':
    case '\'':
      // An odd count means this quote opens.
      return std::count(text.begin(), text.end(), c) % 2 == 1;
    default:
      return false;
  }
}

struct ActionSpec {
  const char* name;
  CommandKind kind;
  bool needs_argument;
};

constexpr ActionSpec kActions[] = {
    {"symbol", CommandKind::kSymbol, true},
    {"char", CommandKind::kCharacter, true},
    {"number", CommandKind::kNumber, true},
    {"newline", CommandKind::kNewline, false},
    {"paragraph", CommandKind::kParagraph, false},
    {"space", CommandKind::kSpace, false},
    {"back", CommandKind::kBack, false},
    {"delete", CommandKind::kDelete, false},
    {"delete_word", CommandKind::kDeleteWord, false},
    {"delete_sentence", CommandKind::kDeleteSentence, false},
    {"delete_line", CommandKind::kDeleteLine, false},
    {"spell", CommandKind::kSpell, false},
    {"menu", CommandKind::kMenu, false},
    {"close", CommandKind::kClose, false},
    {"no", CommandKind::kNo, false},
    {"emotion", CommandKind::kEmotion, false},
    {"reserved", CommandKind::kReserved, false},
};

}  // namespace

const char* DefaultGrammarConfig() {
  return R"(# phrase = action [argument]
one = number 1
two = number 2
three = number 3
four = number 4
five = number 5
six = number 6
seven = number 7
eight = number 8
nine = number 9
zero = number 0
a = char a
b = char b
c = char c
d = char d
e = char e
f = char f
g = char g
h = char h
i = char i
j = char j
k = char k
l = char l
m = char m
n = char n
o = char o
p = char p
q = char q
r = char r
s = char s
t = char t
u = char u
v = char v
w = char w
x = char x
y = char y
z = char z
newline = newline
new line = newline
new lines = newline
paragraph = paragraph
space = space
back = back
delete = delete
delete word = delete_word
delete sentence = delete_sentence
delete line = delete_line
period = symbol .
dot = symbol .
comma = symbol ,
quote = symbol '
double quote = symbol "
question mark = symbol ?
exclamation mark = symbol !
left parenthesis = symbol (
right parenthesis = symbol )
left bracket = symbol [
right bracket = symbol ]
at = symbol @
atmark = symbol @
number = symbol #
sharp = symbol #
dollar = symbol $
ampersand = symbol &
asterisk = symbol *
underline = symbol _
hyphen = symbol -
minus = symbol -
plus = symbol +
percent = symbol %
equal = symbol =
spell = spell
menu = menu
candidates = menu
close = close
no = no
emotion = emotion
open = reserved
yes = reserved
line = reserved
new = reserved
repeat = reserved
next = reserved
page = reserved
word = reserved
)";
}

CommandGrammar CommandGrammar::Default() { return Parse(DefaultGrammarConfig()); }

CommandGrammar CommandGrammar::Parse(const std::string& config) {
  CommandGrammar g;
  std::istringstream in(config);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  "grammar line " + std::to_string(line_no) + ": missing '='");
    }
    const std::string phrase = Join(SplitWords(trimmed.substr(0, eq)), 0,
                                    SplitWords(trimmed.substr(0, eq)).size());
    const std::string action = Trim(trimmed.substr(eq + 1));
    const auto space = action.find(' ');
    const std::string name = action.substr(0, space);
    const std::string argument =
        space == std::string::npos ? "" : Trim(action.substr(space + 1));
    const ActionSpec* spec = nullptr;
    for (const auto& a : kActions) {
      if (name == a.name) spec = &a;
    }
    if (phrase.empty() || spec == nullptr ||
        spec->needs_argument == argument.empty()) {
      throw Error(ErrorCode::kConfig, "grammar line " + std::to_string(line_no) +
                                          ": bad entry '" + trimmed + "'");
    }
    Command cmd;
    cmd.kind = spec->kind;
    cmd.argument = argument;
    if (cmd.kind == CommandKind::kNumber) {
      if (argument.size() != 1 || !std::isdigit(static_cast<unsigned char>(argument[0]))) {
        throw Error(ErrorCode::kConfig, "grammar line " +
                                            std::to_string(line_no) +
                                            ": number needs one digit");
      }
      cmd.number = argument[0] - '0';
    }
    g.Add(phrase, cmd);
  }
  return g;
}

CommandGrammar CommandGrammar::Load(const std::string& path) {
  return Parse(ReadFile(path));
}

void CommandGrammar::Add(const std::string& phrase, Command command) {
  const auto words = SplitWords(phrase);
  const std::string key = Join(words, 0, words.size());
  command.phrase = key;
  max_words_ = std::max(max_words_, words.size());
  phrases_[key] = std::move(command);
}

std::optional<std::vector<Command>> CommandGrammar::ParseUtterance(
    const std::string& text, std::string* unknown) const {
  const auto words = SplitWords(text);
  std::vector<Command> out;
  std::size_t i = 0;
  while (i < words.size()) {
    bool matched = false;
    for (std::size_t n = std::min(max_words_, words.size() - i); n >= 1; --n) {
      auto it = phrases_.find(Join(words, i, n));
      if (it != phrases_.end()) {
        out.push_back(it->second);
        i += n;
        matched = true;
        break;
      }
    }
    if (!matched) {
      if (unknown) *unknown = words[i];
      return std::nullopt;
    }
  }
  return out;
}

std::string EncodeUtf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

EmojiTable EmojiTable::Default() {
  return Parse(
      "smile = U+1F60A\n"
      "laugh = U+1F602\n"
      "sad = U+1F622\n"
      "heart = U+2764\n");
}

EmojiTable EmojiTable::Parse(const std::string& config) {
  EmojiTable table;
  std::istringstream in(config);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    const std::string word = eq == std::string::npos ? "" : Trim(trimmed.substr(0, eq));
    const std::string value = eq == std::string::npos ? "" : Trim(trimmed.substr(eq + 1));
    if (word.empty() || value.empty() || word.find(' ') != std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  "emoji line " + std::to_string(line_no) + ": bad entry");
    }
    std::string utf8;
    if (value.rfind("U+", 0) == 0 || value.rfind("u+", 0) == 0) {
      std::istringstream cps(value);
      for (std::string tok; cps >> tok;) {
        if (tok.size() < 3 || (tok[0] != 'U' && tok[0] != 'u') || tok[1] != '+') {
          throw Error(ErrorCode::kConfig, "emoji line " +
                                              std::to_string(line_no) +
                                              ": bad codepoint " + tok);
        }
        std::size_t used = 0;
        unsigned long cp = 0;
        try {
          cp = std::stoul(tok.substr(2), &used, 16);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != tok.size() - 2 || cp > 0x10FFFF) {
          throw Error(ErrorCode::kConfig, "emoji line " +
                                              std::to_string(line_no) +
                                              ": bad codepoint " + tok);
        }
        utf8 += EncodeUtf8(static_cast<char32_t>(cp));
      }
    } else {
      utf8 = value;
    }
    auto key = SplitWords(word);
    table.Set(key.front(), utf8);
  }
  return table;
}

EmojiTable EmojiTable::Load(const std::string& path) {
  return Parse(ReadFile(path));
}

std::optional<std::string> EmojiTable::Find(const std::string& word) const {
  auto words = SplitWords(word);
  if (words.size() != 1) return std::nullopt;
  auto it = map_.find(words.front());
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

ApplyOutcome CommandEngine::Apply(const TranscriptEvent& event) {
  return event.channel == Channel::kWhisperStream ? ApplyWhisper(event)
                                                  : ApplyNormal(event);
}

ApplyOutcome CommandEngine::ApplyNormal(const TranscriptEvent& event) {
  ApplyOutcome out;
  state_.menu.reset();
  const std::string text = Trim(event.text);
  if (text.empty()) return out;
  if (!state_.text.empty() && !AttachesNext(state_.text)) state_.text += ' ';
  const std::size_t begin = state_.text.size();
  state_.text += text;
  state_.last_utterance = TextSpan{begin, state_.text.size()};
  state_.last_alternatives = event.alternatives;
  if (state_.last_alternatives.empty()) state_.last_alternatives.push_back(text);
  out.changed = true;
  return out;
}

ApplyOutcome CommandEngine::ApplyWhisper(const TranscriptEvent& event) {
  ApplyOutcome out;
  std::string unknown;
  auto commands = grammar_.ParseUtterance(event.text, &unknown);
  if (!commands) {
    out.warnings.push_back("unknown whispered phrase '" + unknown + "' in '" +
                           event.text + "'");
    return out;
  }
  if (commands->empty()) {
    out.warnings.push_back("empty whispered utterance");
    return out;
  }
  const std::string before = state_.text;
  for (const auto& cmd : *commands) Execute(cmd, out);
  out.changed = state_.text != before;
  return out;
}

void CommandEngine::Execute(const Command& cmd, ApplyOutcome& out) {
  const bool menu_open = state_.menu.has_value();
  if (menu_open) {
    switch (cmd.kind) {
      case CommandKind::kNumber: {
        const auto& menu = *state_.menu;
        if (cmd.number < 1 ||
            static_cast<std::size_t>(cmd.number) > menu.candidates.size()) {
          out.warnings.push_back("menu has no candidate " +
                                 std::to_string(cmd.number));
          return;
        }
        const std::string chosen = menu.candidates[cmd.number - 1];
        const TextSpan target = menu.target;
        state_.text.replace(target.begin, target.end - target.begin, chosen);
        state_.last_utterance = TextSpan{target.begin, target.begin + chosen.size()};
        state_.menu.reset();
        return;
      }
      case CommandKind::kClose:
      case CommandKind::kNo:
        state_.menu.reset();
        return;
      case CommandKind::kMenu:
        out.warnings.push_back("menu already open");
        return;
      case CommandKind::kReserved:
        out.warnings.push_back("reserved phrase '" + cmd.phrase + "' has no effect");
        return;
      default:
        // Any editing command dismisses the menu first.
        state_.menu.reset();
        break;
    }
  }

  switch (cmd.kind) {
    case CommandKind::kSymbol:
      Append(cmd.argument);
      break;
    case CommandKind::kCharacter:
      InsertWord(cmd.argument);
      break;
    case CommandKind::kNumber:
      InsertWord(std::to_string(cmd.number));
      break;
    case CommandKind::kNewline:
      Append("\n");
      break;
    case CommandKind::kParagraph:
      Append("\n\n");
      break;
    case CommandKind::kSpace:
      Append(" ");
      break;
    case CommandKind::kBack:
    case CommandKind::kDeleteWord:
      DeleteLastWord();
      break;
    case CommandKind::kDelete: {
      if (state_.text.empty()) break;
      std::size_t pos = state_.text.size() - 1;
      // Step back over UTF-8 continuation bytes.
      while (pos > 0 && (static_cast<unsigned char>(state_.text[pos]) & 0xC0) == 0x80) --pos;
      ReplaceTail(pos, "");
      break;
    }
    case CommandKind::kDeleteSentence: {
      const std::string& t = state_.text;
      std::size_t stop = 0;
      std::size_t search = t.size();
      if (search > 0 && IsSentenceEnd(t[search - 1])) --search;
      for (std::size_t i = search; i > 0; --i) {
        if (IsSentenceEnd(t[i - 1])) {
          stop = i;
          break;
        }
      }
      DeleteBackTo(stop);
      break;
    }
    case CommandKind::kDeleteLine: {
      const std::string& t = state_.text;
      std::size_t stop = 0;
      std::size_t search = t.size();
      if (search > 0 && t[search - 1] == '\n') --search;
      for (std::size_t i = search; i > 0; --i) {
        if (t[i - 1] == '\n') {
          stop = i;
          break;
        }
      }
      DeleteBackTo(stop);
      break;
    }
    case CommandKind::kSpell:
      SpellCommit(out);
      break;
    case CommandKind::kEmotion:
      EmotionCommit(out);
      break;
    case CommandKind::kMenu:
      if (state_.last_alternatives.empty() || !state_.last_utterance) {
        out.warnings.push_back("menu: no recognition candidates available");
        break;
      }
      state_.menu = CandidateMenu{state_.last_alternatives, *state_.last_utterance};
      out.menu_opened = true;
      break;
    case CommandKind::kClose:
      out.warnings.push_back("close: no menu is open");
      break;
    case CommandKind::kNo:
    case CommandKind::kReserved:
      out.warnings.push_back("reserved phrase '" + cmd.phrase + "' has no effect");
      break;
  }
}

void CommandEngine::InsertWord(const std::string& word) {
  if (!state_.text.empty() && !AttachesNext(state_.text)) state_.text += ' ';
  state_.text += word;
}

void CommandEngine::Append(const std::string& s) { state_.text += s; }

void CommandEngine::ReplaceTail(std::size_t pos, const std::string& with) {
  state_.text.resize(pos);
  state_.text += with;
  if (state_.last_utterance && pos < state_.last_utterance->end) {
    state_.last_utterance.reset();
    state_.last_alternatives.clear();
  }
}

void CommandEngine::DeleteBackTo(std::size_t stop_after) {
  if (stop_after < state_.text.size()) ReplaceTail(stop_after, "");
}

void CommandEngine::DeleteLastWord() {
  const std::string& t = state_.text;
  std::size_t end = t.size();
  while (end > 0 && IsSpace(t[end - 1])) --end;
  std::size_t start = end;
  while (start > 0 && !IsSpace(t[start - 1])) --start;
  while (start > 0 && t[start - 1] == ' ') --start;
  DeleteBackTo(start);
}

void CommandEngine::SpellCommit(ApplyOutcome& out) {
  const std::string& t = state_.text;
  std::size_t run_start = t.size();
  std::string joined;
  std::size_t pos = t.size();
  // Walk back over single-character alphanumeric tokens separated by spaces.
  while (pos > 0 && IsAlnum(t[pos - 1]) && (pos == 1 || t[pos - 2] == ' ' ||
                                             (pos >= 2 && IsSpace(t[pos - 2])))) {
    joined.insert(joined.begin(), t[pos - 1]);
    run_start = pos - 1;
    if (pos == 1 || t[pos - 2] != ' ') break;
    pos -= 2;
  }
  if (joined.empty()) {
    out.warnings.push_back("spell: no spelled characters before the cursor");
    return;
  }
  ReplaceTail(run_start, joined);
}

void CommandEngine::EmotionCommit(ApplyOutcome& out) {
  const std::string& t = state_.text;
  std::size_t start = t.size();
  while (start > 0 && !IsSpace(t[start - 1])) --start;
  const std::string word = t.substr(start);
  auto emoji = word.empty() ? std::nullopt : emoji_.Find(word);
  if (!emoji) {
    out.warnings.push_back("emotion: no emoji for '" + word + "'");
    return;
  }
  ReplaceTail(start, *emoji);
}

}  // namespace dualvoice

// Scores a handful of predictions against one reference per action family.

#include <cstdio>
#include <string>

#include "guae/reward.hpp"

namespace {

void show(const char* thought, const char* prediction, const guae::Action& ref) {
  const auto b = guae::combined_reward(thought, prediction, ref);
  std::printf("%-44s %-64s r_am=%.4f r_cons=%.2f r=%.4f (%s)%s\n", thought, prediction, b.r_am, b.r_cons,
              b.r_combined, std::string(guae::to_string(b.verdict.label)).c_str(),
              b.parse_error ? " [invalid action]" : "");
}

}  // namespace

int main() {
  const auto click = guae::Action::click({500, 500});
  show("Tap the search icon", R"({"name":"click","arguments":{"coordinate":[500,500]}})", click);
  show("Tap the search icon", R"({"name":"click","arguments":{"coordinate":[560,500]}})", click);
  show("I should type the query", R"({"name":"click","arguments":{"coordinate":[500,500]}})", click);
  show("Tap it", R"({"name":"click","arguments":{}})", click);

  const auto back = guae::Action::system_button(guae::Button::Back);
  show("The dialog is occluded, go back", R"({"name":"system_button","arguments":{"button":"Back"}})", back);
  show("Return to the home screen", R"({"name":"system_button","arguments":{"button":"Home"}})", back);

  const auto text = guae::Action::type("hello world");
  show("I will type 'hello world'", R"({"name":"type","arguments":{"text":"helo world"}})", text);
  return 0;
}

// CLI entry point; subcommands are wired up in src/cli.cpp.
#include <iostream>

int main() {
  std::cout << "c2v: subcommands not wired yet\n";
  return 0;
}

/** Browser entry point: mount the app against ?server=<base-url>. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

async function mount(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("server") ?? "http://127.0.0.1:8799";
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const app = await App.create(root, new ApiClient(base));
  app.bindKeyboard(window);
}

void mount();

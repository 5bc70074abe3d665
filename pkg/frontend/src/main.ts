import { ApiClient } from "./api.js";
import { App } from "./app.js";

declare global {
  interface Window {
    STP_API_BASE?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  const app = new App(root, new ApiClient(window.STP_API_BASE ?? ""));
  void app.init();
}

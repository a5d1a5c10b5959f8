import { start } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
start(root).catch((err) => {
  root.textContent = `failed to start: ${err}`;
});

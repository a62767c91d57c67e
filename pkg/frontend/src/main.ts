import { boot } from "./app";
import "./style.css";

const root = document.getElementById("app");
if (root) {
  const params = new URLSearchParams(window.location.search);
  const bundleUrl = params.get("bundle") ?? "./bundle";
  void boot(root, bundleUrl, { window });
}

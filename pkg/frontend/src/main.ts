import { Dashboard } from "./dashboard";

function boot(): void {
  const dashboard = new Dashboard(document);
  dashboard.start();
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot, { once: true });
} else {
  boot();
}

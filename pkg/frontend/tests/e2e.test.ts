/**
 * End-to-end browser flow against the real backend.
 *
 * Spawns `python3 -m stp_recommender.cli serve` on a scratch state file,
 * seeds a three-item catalog through the admin ingest endpoint (catalog
 * administration is CLI/API territory, not part of this UI), then drives
 * the DOM: create two profiles, like from one account, verify the
 * neighbor's refreshed feed reflects the like, log attendance, and check
 * the report table plus CSV download.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";

let server: ChildProcess;
let base: string;
let client: ApiClient;

const FEED = [
  { title: "Finance Forum", provider: "CHED", start_date: "2030-02-01", explicit_tags: ["finance"] },
  { title: "Tax Update", provider: "CHED", start_date: "2030-02-02", explicit_tags: ["accounting", "taxation"] },
  { title: "Network Security", provider: "CHED", start_date: "2030-02-03", explicit_tags: ["networking"] },
];

async function waitFor(check: () => boolean, label: string, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${label}`);
}

async function freePort(): Promise<number> {
  const { createServer } = await import("node:net");
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  const dataDir = mkdtempSync(join(tmpdir(), "stp-e2e-"));
  base = `http://127.0.0.1:${port}`;
  server = spawn("python3", [
    "-m",
    "stp_recommender.cli",
    "serve",
    "--data",
    join(dataDir, "state.json"),
    "--port",
    String(port),
  ]);

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const health = await fetch(`${base}/api/health`);
      if (health.ok) break;
    } catch {
      if (Date.now() > deadline) throw new Error("backend did not come up");
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }

  const ingest = await fetch(`${base}/api/admin/ingest`, {
    method: "POST",
    body: JSON.stringify(FEED),
  });
  expect(ingest.status).toBe(200);
  client = new ApiClient(base);
});

afterAll(() => {
  server?.kill();
});

function field(root: HTMLElement, name: string): HTMLInputElement {
  const input = root.querySelector<HTMLInputElement>(`[data-field="${name}"]`);
  if (!input) throw new Error(`no field ${name}`);
  return input;
}

function click(root: HTMLElement, testId: string): void {
  const button = root.querySelector<HTMLElement>(`[data-testid="${testId}"]`);
  if (!button) throw new Error(`no element ${testId}`);
  button.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

async function createProfileViaForm(
  root: HTMLElement,
  app: App,
  values: Record<string, string>,
): Promise<string> {
  click(root, "create-new");
  for (const [name, value] of Object.entries(values)) {
    field(root, name).value = value;
  }
  click(root, "save-profile");
  await waitFor(
    () => app.session.profile !== null && app.session.profile.name === values.name,
    `profile ${values.name} saved`,
  );
  return app.session.selectedFacultyId!;
}

it("covers the full browser flow", async () => {
  const root = document.getElementById("app") ?? document.createElement("div");
  root.id = "app";
  document.body.append(root);

  const app = new App(root, client);
  await app.init();

  // Create Benjie through the profile editor.
  const benjieId = await createProfileViaForm(root, app, {
    name: "Benjie A Bautista",
    college: "CABEIHM",
    programs: "BS-Accountancy, BS Business Administration",
    interests: "Finance, Entrepreneurship, Business Management",
    expertise: "",
  });

  // Server-normalized tokens come back into the form fields.
  expect(field(root, "college").value).toBe("cabeihm");
  expect(field(root, "programs").value).toBe("bs-accountancy, bs-business-administration");

  // Benjie's feed rendered from the live API.
  await waitFor(() => app.session.feed.length > 0, "benjie feed");
  const benjieCards = root.querySelectorAll('[data-testid="feed-card"]');
  expect(benjieCards.length).toBeGreaterThan(0);

  // Like Finance Forum from the feed card.
  const items = new Map(app.catalog.map((item) => [item.title, item.stp_id]));
  const forumId = items.get("Finance Forum")!;
  const forumCard = root.querySelector<HTMLElement>(`[data-stp="${forumId}"]`);
  expect(forumCard).not.toBeNull();
  forumCard!
    .querySelector<HTMLElement>('[data-testid="like-button"]')!
    .dispatchEvent(new MouseEvent("click", { bubbles: true }));

  await waitFor(() => app.session.likedIds.has(forumId), "like registered");
  // Liked items leave the feed and appear in the liked list.
  await waitFor(
    () => app.session.feed.every((entry) => entry.stp_id !== forumId),
    "liked item out of feed",
  );
  expect(root.querySelector('[data-testid="liked-list"]')?.textContent).toContain(
    "Finance Forum",
  );

  // Create Josh; his refreshed feed must reflect Benjie's like.
  const joshId = await createProfileViaForm(root, app, {
    name: "Josh Magtibay",
    college: "CABEIHM",
    programs: "BS-HRM, BS-Accountancy",
    interests: "Accounting, Finance",
    expertise: "",
  });
  expect(joshId).not.toBe(benjieId);
  await waitFor(() => app.session.feed.length > 0, "josh feed");

  const forumEntry = app.session.feed.find((entry) => entry.stp_id === forumId)!;
  expect(forumEntry).toBeDefined();
  expect(forumEntry.collab_component).toBeCloseTo(1.0, 9);
  expect(forumEntry.score).toBeCloseTo(1.0, 9);
  expect(
    forumEntry.contributing_neighbors.map((neighbor) => neighbor.faculty_id),
  ).toContain(benjieId);
  const forumCardForJosh = root.querySelector<HTMLElement>(`[data-stp="${forumId}"]`);
  expect(forumCardForJosh?.textContent).toContain("Faculty similar to you liked this");
  expect(forumCardForJosh?.textContent).toContain("Benjie A Bautista");

  // Log attendance for Tax Update as Josh.
  const taxId = items.get("Tax Update")!;
  const picker = root.querySelector<HTMLSelectElement>('[data-testid="attendance-item"]')!;
  picker.value = taxId;
  (root.querySelector('[data-testid="attendance-date"]') as HTMLInputElement).value =
    "2030-02-02";
  (root.querySelector('[data-testid="attendance-remarks"]') as HTMLInputElement).value =
    "completed";
  click(root, "attendance-submit");
  await waitFor(() => app.reportRows.length > 0, "report row appears");
  // Attended items disappear from Josh's feed; this is also the last
  // pending re-render, so the DOM is stable for the filter interaction.
  await waitFor(
    () => app.session.feed.every((entry) => entry.stp_id !== taxId),
    "attended item out of feed",
  );

  // Filter the report by Josh's college and re-run.
  (root.querySelector('[data-testid="report-college"]') as HTMLInputElement).value =
    "cabeihm";
  click(root, "report-run");
  // The filtered rows and the updated CSV link land with the post-fetch render.
  await waitFor(
    () =>
      root
        .querySelector('[data-testid="csv-link"]')
        ?.getAttribute("href")
        ?.includes("college=cabeihm") === true,
    "filtered report render",
  );
  expect(app.reportRows.length).toBe(1);
  expect(app.reportRows[0].faculty_name).toBe("Josh Magtibay");
  const reportRow = root.querySelector('[data-testid="report-row"]');
  expect(reportRow?.textContent).toContain("Josh Magtibay");
  expect(reportRow?.textContent).toContain("Tax Update");

  // The CSV link carries the live filters and serves the API's bytes.
  const csvHref = root
    .querySelector<HTMLAnchorElement>('[data-testid="csv-link"]')!
    .getAttribute("href")!;
  expect(csvHref).toContain("format=csv");
  expect(csvHref).toContain("college=cabeihm");
  const csv = await (await fetch(csvHref)).text();
  const lines = csv.trim().split("\r\n");
  expect(lines[0]).toBe("faculty_name,college,title,provider,date_attended");
  expect(lines[1]).toBe("Josh Magtibay,cabeihm,Tax Update,CHED,2030-02-02");

  // A feed fetch error path: invalid report range surfaces the API message.
  (root.querySelector('[data-testid="report-from"]') as HTMLInputElement).value =
    "2031-01-01";
  (root.querySelector('[data-testid="report-to"]') as HTMLInputElement).value =
    "2030-01-01";
  click(root, "report-run");
  await waitFor(() => app.errorMessage.length > 0, "error banner");
  const banner = root.querySelector('[data-testid="error-banner"]');
  expect(banner?.classList.contains("hidden")).toBe(false);
  expect(banner?.textContent).toContain("invalid date range");
});
